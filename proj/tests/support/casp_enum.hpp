#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phd/casp/ast.hpp"

namespace phd::oracle {

struct casp_universe {
  std::vector<std::string> counters = {"x", "y"};
  std::string array = "a";
  std::vector<std::int64_t> constants = {-1, 0, 1, 2};
  std::string placement_label = "M";
};

// Every program whose AST depth is at most `depth`. Depth counts every node:
// numerals and counter names are 1, a cell is 1 + its index, an expression is
// 1 + its deepest value, and a program is 1 + its deepest child.
std::vector<casp::program> enumerate_casp(int depth, const casp_universe& u = {});

}  // namespace phd::oracle
