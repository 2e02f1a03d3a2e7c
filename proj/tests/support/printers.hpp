#pragma once

// Readable gtest output for AST values.

#include <ostream>

#include "phd/casp/ast.hpp"
#include "phd/host/analysis.hpp"
#include "phd/host/parser.hpp"

namespace phd::casp {
inline void PrintTo(const program& p, std::ostream* os) { *os << serialize(p); }
}  // namespace phd::casp

namespace phd::host {
inline void PrintTo(const program& p, std::ostream* os) { *os << "\n" << to_source(p); }
inline void PrintTo(const position& pos, std::ostream* os) {
  *os << "(";
  for (std::size_t i = 0; i < pos.path.size(); ++i) *os << (i ? "," : "") << pos.path[i];
  *os << ")";
}
}  // namespace phd::host

namespace phd {
inline void PrintTo(const label& l, std::ostream* os) { *os << l.name; }
}  // namespace phd
