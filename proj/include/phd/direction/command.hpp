#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "phd/casp/ast.hpp"

namespace phd::direction {

// `true`, or equality of two indices (numerals or counter names).
struct condition {
  std::optional<std::pair<casp::index, casp::index>> equals;

  bool always() const { return !equals.has_value(); }
  bool operator==(const condition&) const = default;
};

condition when_equal(casp::index lhs, casp::index rhs);

enum class count_kind { reads, writes, calls };
enum class ctl_op { stop, clear, print, full };

std::string_view to_string(count_kind kind);
std::string_view to_string(ctl_op op);

struct print_cmd {
  std::string var;
  bool operator==(const print_cmd&) const = default;
};
// `where` is either a position `fname/i/...` or an existing label.
struct break_cmd {
  std::string where;
  condition when;
  bool operator==(const break_cmd&) const = default;
};
struct unbreak_cmd {
  std::string where;
  bool operator==(const unbreak_cmd&) const = default;
};
struct watch_cmd {
  std::string var;
  condition when;
  bool operator==(const watch_cmd&) const = default;
};
struct unwatch_cmd {
  std::string var;
  bool operator==(const unwatch_cmd&) const = default;
};
struct trace_start_cmd {
  std::string var;
  condition when;
  std::uint64_t budget = 0;
  bool operator==(const trace_start_cmd&) const = default;
};
struct trace_ctl_cmd {
  ctl_op op;
  std::string var;
  bool operator==(const trace_ctl_cmd&) const = default;
};
struct count_start_cmd {
  count_kind kind;
  std::string target;
  condition when;
  std::uint64_t budget = 0;
  bool operator==(const count_start_cmd&) const = default;
};
struct count_ctl_cmd {
  ctl_op op;
  std::optional<count_kind> kind;
  std::string target;
  bool operator==(const count_ctl_cmd&) const = default;
};
struct resume_cmd {
  bool operator==(const resume_cmd&) const = default;
};
struct exec_cmd {
  casp::program program;
  bool operator==(const exec_cmd&) const = default;
};

using command = std::variant<print_cmd, break_cmd, unbreak_cmd, watch_cmd, unwatch_cmd,
                             trace_start_cmd, trace_ctl_cmd, count_start_cmd, count_ctl_cmd,
                             resume_cmd, exec_cmd>;

// Command line text that parses back to the same command.
std::string to_text(const command& c);

// Commands that introduce labels and controller state (break, watch, trace
// start, count start).
bool is_establishing(const command& c);

}  // namespace phd::direction
