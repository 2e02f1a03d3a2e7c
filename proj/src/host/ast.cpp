#include "phd/host/ast.hpp"

#include <array>
#include <algorithm>

namespace phd::host {

expr make_num(std::int64_t value) { return expr{numeral{value}}; }
expr make_var(std::string name) { return expr{var_ref{std::move(name)}}; }
expr make_call(std::string function, std::vector<expr> args) {
  return expr{call_expr{std::move(function), std::move(args)}};
}
expr make_binary(binop op, expr lhs, expr rhs) {
  return expr{binary_expr{op, box<expr>(std::move(lhs)), box<expr>(std::move(rhs))}};
}

stmt make_skip() { return stmt{skip_stmt{}}; }
stmt make_assign(std::string target, expr value) {
  return stmt{assign_stmt{std::move(target), std::move(value)}};
}
stmt make_if(expr condition, std::vector<stmt> body) {
  return stmt{if_stmt{std::move(condition), std::move(body)}};
}
stmt make_extend(std::vector<label> labels) { return stmt{extend_stmt{std::move(labels)}}; }

const function_decl* program::find_function(std::string_view name) const {
  auto it = std::find_if(functions.begin(), functions.end(),
                         [&](const function_decl& f) { return f.name == name; });
  return it == functions.end() ? nullptr : &*it;
}

std::size_t program::function_index(std::string_view name) const {
  for (std::size_t i = 0; i < functions.size(); ++i) {
    if (functions[i].name == name) {
      return i;
    }
  }
  throw program_error(fault::unknown_function, "unknown function '" + std::string(name) + "'");
}

syntax_error::syntax_error(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

bool is_reserved_word(std::string_view word) {
  static constexpr std::array<std::string_view, 13> words = {
      "int", "return", "if", "then", "skip", "extend", "else",
      "inc", "dec", "break", "continue", "true", "when"};
  return std::find(words.begin(), words.end(), word) != words.end();
}

}  // namespace phd::host
