#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <sstream>
#include <vector>

#include "phd/casp/ast.hpp"

namespace phd::casp {

program make_expr(expr e) { return program{expr_prog{std::move(e)}}; }
program make_value(value v) { return make_expr(plain_expr{std::move(v)}); }
program make_assign(updatable target, expr e) {
  return program{assign_prog{std::move(target), std::move(e)}};
}
program make_step(step_op op, updatable target) { return program{step_prog{op, std::move(target)}}; }
program make_seq(program first, program second) {
  return program{seq_prog{box<program>(std::move(first)), box<program>(std::move(second))}};
}
program make_seq(std::initializer_list<program> parts) {
  std::vector<program> items(parts);
  program out = items.back();
  for (auto it = items.rbegin() + 1; it != items.rend(); ++it) {
    out = make_seq(*it, std::move(out));
  }
  return out;
}
program make_ite(expr condition, program then_branch, program else_branch) {
  return program{ite_prog{std::move(condition), box<program>(std::move(then_branch)),
                          box<program>(std::move(else_branch))}};
}
program make_break() { return program{break_prog{}}; }
program make_continue() { return program{continue_prog{}}; }
program make_place(label at, program body) {
  return program{place_prog{std::move(at), box<program>(std::move(body))}};
}

bool contains_placement(const program& p) {
  if (std::holds_alternative<place_prog>(p.node)) {
    return true;
  }
  if (const auto* s = std::get_if<seq_prog>(&p.node)) {
    return contains_placement(*s->first) || contains_placement(*s->second);
  }
  if (const auto* i = std::get_if<ite_prog>(&p.node)) {
    return contains_placement(*i->then_branch) || contains_placement(*i->else_branch);
  }
  return false;
}

bool placement_free_nesting(const program& p) {
  if (const auto* pl = std::get_if<place_prog>(&p.node)) {
    return !contains_placement(*pl->body);
  }
  if (const auto* s = std::get_if<seq_prog>(&p.node)) {
    return placement_free_nesting(*s->first) && placement_free_nesting(*s->second);
  }
  if (const auto* i = std::get_if<ite_prog>(&p.node)) {
    return placement_free_nesting(*i->then_branch) && placement_free_nesting(*i->else_branch);
  }
  return true;
}

bool is_keyword(std::string_view word) {
  static constexpr std::array<std::string_view, 7> words = {"if",  "then",  "else",    "inc",
                                                            "dec", "break", "continue"};
  return std::find(words.begin(), words.end(), word) != words.end();
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

void emit_index(std::ostream& os, const index& i) {
  if (const auto* n = std::get_if<std::int64_t>(&i)) {
    os << *n;
  } else {
    os << std::get<counter_ref>(i).name;
  }
}

void emit_value(std::ostream& os, const value& v) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::int64_t>) {
          os << x;
        } else if constexpr (std::is_same_v<T, counter_ref>) {
          os << x.name;
        } else {
          os << x.array << '[';
          emit_index(os, x.at);
          os << ']';
        }
      },
      v);
}

void emit_updatable(std::ostream& os, const updatable& u) {
  std::visit([&](const auto& x) { emit_value(os, value{x}); }, u);
}

void emit_expr(std::ostream& os, const expr& e) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, plain_expr>) {
          emit_value(os, x.v);
        } else if constexpr (std::is_same_v<T, negate_expr>) {
          os << "- ";
          emit_value(os, x.v);
        } else {
          emit_value(os, x.lhs);
          os << (x.op == compare_op::eq ? " = " : " < ");
          emit_value(os, x.rhs);
        }
      },
      e);
}

void emit(std::ostream& os, const program& p) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, expr_prog>) {
          emit_expr(os, x.e);
        } else if constexpr (std::is_same_v<T, assign_prog>) {
          emit_updatable(os, x.target);
          os << " := ";
          emit_expr(os, x.e);
        } else if constexpr (std::is_same_v<T, step_prog>) {
          os << (x.op == step_op::inc ? "inc " : "dec ");
          emit_updatable(os, x.target);
        } else if constexpr (std::is_same_v<T, seq_prog>) {
          bool wrap = std::holds_alternative<seq_prog>(x.first->node) ||
                      std::holds_alternative<ite_prog>(x.first->node);
          os << (wrap ? "(" : "");
          emit(os, *x.first);
          os << (wrap ? ")" : "") << "; ";
          emit(os, *x.second);
        } else if constexpr (std::is_same_v<T, ite_prog>) {
          os << "if ";
          emit_expr(os, x.condition);
          os << " then ";
          emit(os, *x.then_branch);
          os << " else ";
          emit(os, *x.else_branch);
        } else if constexpr (std::is_same_v<T, break_prog>) {
          os << "break";
        } else if constexpr (std::is_same_v<T, continue_prog>) {
          os << "continue";
        } else {
          os << '@' << x.at.name << ":{";
          emit(os, *x.body);
          os << '}';
        }
      },
      p.node);
}

// ---------------------------------------------------------------------------
// Parsing

enum class tok { ident, number, punct, end };

struct token {
  tok kind = tok::end;
  std::string text;
  std::size_t offset = 0;
};

[[noreturn]] void fail(std::size_t offset, const std::string& message) {
  throw casp_error(error_code::parse_error,
                   "parse error at offset " + std::to_string(offset) + ": " + message);
}

std::vector<token> lex(std::string_view src) {
  std::vector<token> out;
  std::size_t i = 0;
  auto is_digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
  while (true) {
    while (i < src.size() && std::isspace(static_cast<unsigned char>(src[i]))) {
      ++i;
    }
    token t;
    t.offset = i;
    if (i >= src.size()) {
      out.push_back(t);
      return out;
    }
    char c = src[i];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      t.kind = tok::ident;
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
        t.text += src[i++];
      }
    } else if (is_digit(c) || (c == '-' && i + 1 < src.size() && is_digit(src[i + 1]))) {
      t.kind = tok::number;
      t.text += src[i++];
      while (i < src.size() && is_digit(src[i])) {
        t.text += src[i++];
      }
    } else {
      t.kind = tok::punct;
      auto two = src.substr(i, 2);
      if (two == ":=" || two == "==") {
        t.text = std::string(two);
        i += 2;
      } else if (std::string_view("=<;(){}[]@:-").find(c) != std::string_view::npos) {
        t.text = std::string(1, c);
        ++i;
      } else {
        fail(i, std::string("unexpected character '") + c + "'");
      }
    }
    out.push_back(std::move(t));
  }
}

class parser {
 public:
  explicit parser(std::vector<token> toks) : toks_(std::move(toks)) {}

  program parse_all() {
    auto p = parse_seq();
    if (peek().kind != tok::end) {
      fail(peek().offset, "unexpected '" + peek().text + "'");
    }
    return p;
  }

 private:
  const token& peek() const { return toks_[pos_]; }
  const token& advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool is_punct(std::string_view p) const { return peek().kind == tok::punct && peek().text == p; }
  bool is_word(std::string_view w) const { return peek().kind == tok::ident && peek().text == w; }
  bool accept(std::string_view p) {
    if (is_punct(p)) {
      advance();
      return true;
    }
    return false;
  }
  void expect(std::string_view p) {
    if (!accept(p)) {
      fail(peek().offset, "expected '" + std::string(p) + "'");
    }
  }
  void expect_word(std::string_view w) {
    if (!is_word(w)) {
      fail(peek().offset, "expected '" + std::string(w) + "'");
    }
    advance();
  }
  std::string expect_name() {
    if (peek().kind != tok::ident || is_keyword(peek().text)) {
      fail(peek().offset, "expected identifier");
    }
    return advance().text;
  }

  program parse_seq() {
    auto first = parse_unit();
    if (accept(";")) {
      return make_seq(std::move(first), parse_seq());
    }
    return first;
  }

  program parse_unit() {
    if (is_word("if")) {
      advance();
      auto cond = parse_expr();
      expect_word("then");
      auto then_branch = parse_seq();
      expect_word("else");
      auto else_branch = parse_seq();
      return make_ite(std::move(cond), std::move(then_branch), std::move(else_branch));
    }
    if (is_word("break")) {
      advance();
      return make_break();
    }
    if (is_word("continue")) {
      advance();
      return make_continue();
    }
    if (is_word("inc") || is_word("dec")) {
      auto op = advance().text == "inc" ? step_op::inc : step_op::dec;
      return make_step(op, parse_updatable());
    }
    if (is_punct("@")) {
      auto at = advance().offset;
      label l(expect_name());
      expect(":");
      expect("{");
      ++placement_depth_;
      auto body = parse_seq();
      --placement_depth_;
      expect("}");
      if (placement_depth_ > 0 || contains_placement(body)) {
        throw casp_error(error_code::nested_placement,
                         "placement at offset " + std::to_string(at) + " is nested in another");
      }
      return make_place(std::move(l), std::move(body));
    }
    if (accept("(")) {
      auto inner = parse_seq();
      expect(")");
      return inner;
    }
    auto start = peek().offset;
    if (is_punct("-")) {
      return make_expr(parse_expr());
    }
    auto v = parse_value();
    if (accept(":=")) {
      if (std::holds_alternative<std::int64_t>(v)) {
        fail(start, "a numeral cannot be assigned");
      }
      updatable u = std::holds_alternative<counter_ref>(v) ? updatable{std::get<counter_ref>(v)}
                                                           : updatable{std::get<cell_ref>(v)};
      return make_assign(std::move(u), parse_expr());
    }
    return make_expr(finish_expr(std::move(v)));
  }

  expr parse_expr() {
    if (accept("-")) {
      return negate_expr{parse_value()};
    }
    return finish_expr(parse_value());
  }

  expr finish_expr(value lhs) {
    if (is_punct("=") || is_punct("==")) {
      advance();
      return compare_expr{compare_op::eq, std::move(lhs), parse_value()};
    }
    if (accept("<")) {
      return compare_expr{compare_op::lt, std::move(lhs), parse_value()};
    }
    return plain_expr{std::move(lhs)};
  }

  std::int64_t parse_number() {
    const token& t = advance();
    std::int64_t n = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), n);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size()) {
      fail(t.offset, "numeral out of 64-bit range");
    }
    return n;
  }

  index parse_index() {
    if (peek().kind == tok::number) {
      return parse_number();
    }
    return counter_ref{expect_name()};
  }

  value parse_value() {
    if (peek().kind == tok::number) {
      return parse_number();
    }
    auto name = expect_name();
    if (accept("[")) {
      auto i = parse_index();
      expect("]");
      return cell_ref{std::move(name), std::move(i)};
    }
    return counter_ref{std::move(name)};
  }

  updatable parse_updatable() {
    auto start = peek().offset;
    auto v = parse_value();
    if (auto* c = std::get_if<counter_ref>(&v)) {
      return *c;
    }
    if (auto* c = std::get_if<cell_ref>(&v)) {
      return *c;
    }
    fail(start, "expected a counter or array cell");
  }

  std::vector<token> toks_;
  std::size_t pos_ = 0;
  int placement_depth_ = 0;
};

}  // namespace

std::string serialize(const program& p) {
  std::ostringstream os;
  emit(os, p);
  return os.str();
}

std::string serialize(const expr& e) {
  std::ostringstream os;
  emit_expr(os, e);
  return os.str();
}

std::string serialize(const value& v) {
  std::ostringstream os;
  emit_value(os, v);
  return os.str();
}

program parse(std::string_view text) { return parser(lex(text)).parse_all(); }

}  // namespace phd::casp
