#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "phd/box.hpp"
#include "phd/label.hpp"

namespace phd::host {

enum class binop { add, sub, eq, lt };

struct expr;

struct numeral {
  std::int64_t value = 0;
  bool operator==(const numeral&) const = default;
};

struct var_ref {
  std::string name;
  bool operator==(const var_ref&) const = default;
};

struct call_expr {
  std::string function;
  std::vector<expr> args;
  bool operator==(const call_expr&) const;
};

struct binary_expr {
  binop op;
  box<expr> lhs;
  box<expr> rhs;
  bool operator==(const binary_expr&) const = default;
};

struct expr {
  std::variant<numeral, var_ref, call_expr, binary_expr> node;
  bool operator==(const expr&) const = default;
};

inline bool call_expr::operator==(const call_expr& other) const {
  return function == other.function && args == other.args;
}

expr make_num(std::int64_t value);
expr make_var(std::string name);
expr make_call(std::string function, std::vector<expr> args);
expr make_binary(binop op, expr lhs, expr rhs);

struct stmt;

struct skip_stmt {
  bool operator==(const skip_stmt&) const = default;
};

struct assign_stmt {
  std::string target;
  expr value;
  bool operator==(const assign_stmt&) const = default;
};

struct if_stmt {
  expr condition;
  std::vector<stmt> body;
  bool operator==(const if_stmt&) const;
};

// Extension point. The label list is ordered; it is evaluated left to right.
struct extend_stmt {
  std::vector<label> labels;
  bool operator==(const extend_stmt&) const = default;
};

struct stmt {
  std::variant<skip_stmt, assign_stmt, if_stmt, extend_stmt> node;
  bool operator==(const stmt&) const = default;

  bool is_extend() const { return std::holds_alternative<extend_stmt>(node); }
};

inline bool if_stmt::operator==(const if_stmt& other) const {
  return condition == other.condition && body == other.body;
}

stmt make_skip();
stmt make_assign(std::string target, expr value);
stmt make_if(expr condition, std::vector<stmt> body);
stmt make_extend(std::vector<label> labels = {});

struct function_decl {
  std::string name;
  std::vector<std::string> params;
  std::vector<stmt> body;
  expr result;
  bool operator==(const function_decl&) const = default;
};

// A whole program: global `int` declarations, functions, and the entry call.
struct program {
  std::vector<std::string> globals;
  std::vector<function_decl> functions;
  std::string entry = "main";
  std::vector<expr> entry_args;
  bool operator==(const program&) const = default;

  const function_decl* find_function(std::string_view name) const;
  std::size_t function_index(std::string_view name) const;
};

enum class fault {
  duplicate_label,
  invalid_position,
  unknown_variable,
  unknown_function,
  arity_mismatch,
  label_exists,
  position_not_extend,
  unknown_target,
  call_depth,
  invalid_program,
};

class program_error : public std::runtime_error {
 public:
  program_error(fault kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  fault kind() const noexcept { return kind_; }

 private:
  fault kind_;
};

class syntax_error : public std::runtime_error {
 public:
  syntax_error(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Words reserved by either the host language or the controller language.
bool is_reserved_word(std::string_view word);

}  // namespace phd::host
