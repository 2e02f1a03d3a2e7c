#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>

#include "phd/box.hpp"
#include "phd/error_code.hpp"
#include "phd/label.hpp"

namespace phd::casp {

struct counter_ref {
  std::string name;
  bool operator==(const counter_ref&) const = default;
};

// I ::= N | X
using index = std::variant<std::int64_t, counter_ref>;

struct cell_ref {
  std::string array;
  index at;
  bool operator==(const cell_ref&) const = default;
};

// V ::= I | R[I]
using value = std::variant<std::int64_t, counter_ref, cell_ref>;
// U ::= X | R[I]
using updatable = std::variant<counter_ref, cell_ref>;

enum class compare_op { eq, lt };

struct plain_expr {
  value v;
  bool operator==(const plain_expr&) const = default;
};
struct negate_expr {
  value v;
  bool operator==(const negate_expr&) const = default;
};
struct compare_expr {
  compare_op op;
  value lhs;
  value rhs;
  bool operator==(const compare_expr&) const = default;
};

// E ::= V | -V | V op V
using expr = std::variant<plain_expr, negate_expr, compare_expr>;

enum class step_op { inc, dec };

struct program;

struct expr_prog {
  expr e;
  bool operator==(const expr_prog&) const = default;
};
struct assign_prog {
  updatable target;
  expr e;
  bool operator==(const assign_prog&) const = default;
};
struct step_prog {
  step_op op;
  updatable target;
  bool operator==(const step_prog&) const = default;
};
struct seq_prog {
  box<program> first;
  box<program> second;
  bool operator==(const seq_prog&) const = default;
};
struct ite_prog {
  expr condition;
  box<program> then_branch;
  box<program> else_branch;
  bool operator==(const ite_prog&) const = default;
};
struct break_prog {
  bool operator==(const break_prog&) const = default;
};
struct continue_prog {
  bool operator==(const continue_prog&) const = default;
};
struct place_prog {
  label at;
  box<program> body;
  bool operator==(const place_prog&) const = default;
};

struct program {
  std::variant<expr_prog, assign_prog, step_prog, seq_prog, ite_prog, break_prog, continue_prog,
               place_prog>
      node;
  bool operator==(const program&) const = default;
};

program make_expr(expr e);
program make_value(value v);
program make_assign(updatable target, expr e);
program make_step(step_op op, updatable target);
program make_seq(program first, program second);
// Right-nested sequence of two or more programs.
program make_seq(std::initializer_list<program> parts);
program make_ite(expr condition, program then_branch, program else_branch);
program make_break();
program make_continue();
program make_place(label at, program body);

bool contains_placement(const program& p);
// True when no placement occurs inside a placement body.
bool placement_free_nesting(const program& p);

class casp_error : public std::runtime_error {
 public:
  casp_error(error_code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  error_code code() const noexcept { return code_; }

 private:
  error_code code_;
};

// Canonical text: single spaces, `; ` between sequenced programs, parentheses
// around a sequenced left operand that is itself a sequence or conditional.
std::string serialize(const program& p);
std::string serialize(const expr& e);
std::string serialize(const value& v);

// Accepts both `=` and `==` for equality. Throws casp_error with
// parse_error or nested_placement.
program parse(std::string_view text);

bool is_keyword(std::string_view word);

}  // namespace phd::casp
