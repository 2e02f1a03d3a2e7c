#include "phd/host/parser.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace phd::host {

namespace {

enum class tok { ident, number, punct, end };

struct token {
  tok kind = tok::end;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

class lexer {
 public:
  explicit lexer(std::string_view src) : src_(src) {}

  std::vector<token> run() {
    std::vector<token> out;
    for (;;) {
      skip_space();
      token t;
      t.line = line_;
      t.column = column_;
      if (at_end()) {
        out.push_back(t);
        return out;
      }
      char c = peek();
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = tok::ident;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
          t.text += advance();
        }
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        t.kind = tok::number;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
          t.text += advance();
        }
      } else {
        t.kind = tok::punct;
        if (c == ':' && peek(1) == '=') {
          t.text = ":=";
          advance();
          advance();
        } else if (c == '=' && peek(1) == '=') {
          t.text = "==";
          advance();
          advance();
        } else if (std::string_view("+-<(){},;").find(c) != std::string_view::npos) {
          t.text = std::string(1, advance());
        } else {
          throw syntax_error(line_, column_, std::string("unexpected character '") + c + "'");
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  bool at_end() const { return pos_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }
  void skip_space() {
    while (!at_end()) {
      char c = peek();
      if (c == '/' && peek(1) == '/') {
        while (!at_end() && peek() != '\n') {
          advance();
        }
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

class parser {
 public:
  explicit parser(std::vector<token> toks) : toks_(std::move(toks)) {}

  program parse() {
    program p;
    bool entry_seen = false;
    while (peek().kind != tok::end) {
      if (is_word("return")) {
        advance();
        auto name = expect_name("entry function name");
        p.entry = name;
        p.entry_args = parse_args();
        accept(";");
        entry_seen = true;
        break;
      }
      expect_word("int");
      auto name = expect_name("declaration name");
      if (is_punct("(")) {
        p.functions.push_back(parse_function(std::move(name)));
      } else {
        p.globals.push_back(std::move(name));
        accept(";");
      }
    }
    if (peek().kind != tok::end) {
      fail(peek(), entry_seen ? "unexpected input after entry call" : "unexpected input");
    }
    return p;
  }

 private:
  const token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const token& advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  bool is_punct(std::string_view p) const {
    return peek().kind == tok::punct && peek().text == p;
  }
  bool is_word(std::string_view w) const {
    return peek().kind == tok::ident && peek().text == w;
  }
  bool accept(std::string_view p) {
    if (is_punct(p)) {
      advance();
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const token& t, const std::string& message) const {
    throw syntax_error(t.line, t.column, message);
  }
  void expect(std::string_view p) {
    if (!accept(p)) {
      fail(peek(), "expected '" + std::string(p) + "'" + found());
    }
  }
  void expect_word(std::string_view w) {
    if (!is_word(w)) {
      fail(peek(), "expected '" + std::string(w) + "'" + found());
    }
    advance();
  }
  std::string found() const {
    return peek().kind == tok::end ? " at end of input" : " but found '" + peek().text + "'";
  }
  std::string expect_name(const char* what) {
    if (peek().kind != tok::ident || is_reserved_word(peek().text)) {
      fail(peek(), std::string("expected ") + what + found());
    }
    return advance().text;
  }

  function_decl parse_function(std::string name) {
    function_decl f;
    f.name = std::move(name);
    expect("(");
    if (!is_punct(")")) {
      do {
        if (is_word("int")) {
          advance();
        }
        f.params.push_back(expect_name("parameter name"));
      } while (accept(","));
    }
    expect(")");
    expect("{");
    f.body = parse_stmts();
    expect_word("return");
    f.result = parse_expr();
    accept(";");
    expect("}");
    return f;
  }

  std::vector<stmt> parse_stmts() {
    std::vector<stmt> out;
    while (!is_punct("}") && !is_word("return") && peek().kind != tok::end) {
      out.push_back(parse_stmt());
      if (!accept(";")) {
        break;
      }
    }
    return out;
  }

  stmt parse_stmt() {
    if (is_word("skip")) {
      advance();
      return make_skip();
    }
    if (is_word("if")) {
      advance();
      auto cond = parse_expr();
      expect_word("then");
      const token& brace = peek();
      expect("{");
      auto body = parse_stmts();
      if (body.empty()) {
        fail(brace, "if-body must contain at least one statement");
      }
      expect("}");
      return make_if(std::move(cond), std::move(body));
    }
    if (is_word("extend")) {
      advance();
      expect("{");
      std::vector<label> labels;
      if (!is_punct("}")) {
        do {
          labels.emplace_back(expect_name("label"));
        } while (accept(","));
      }
      expect("}");
      return make_extend(std::move(labels));
    }
    auto target = expect_name("statement");
    expect(":=");
    return make_assign(std::move(target), parse_expr());
  }

  std::vector<expr> parse_args() {
    expect("(");
    std::vector<expr> args;
    if (!is_punct(")")) {
      do {
        args.push_back(parse_expr());
      } while (accept(","));
    }
    expect(")");
    return args;
  }

  // ==  <  (+ -), all left-associative.
  expr parse_expr() {
    auto lhs = parse_less();
    while (is_punct("==")) {
      advance();
      lhs = make_binary(binop::eq, std::move(lhs), parse_less());
    }
    return lhs;
  }
  expr parse_less() {
    auto lhs = parse_additive();
    while (is_punct("<")) {
      advance();
      lhs = make_binary(binop::lt, std::move(lhs), parse_additive());
    }
    return lhs;
  }
  expr parse_additive() {
    auto lhs = parse_primary();
    while (is_punct("+") || is_punct("-")) {
      auto op = advance().text == "+" ? binop::add : binop::sub;
      lhs = make_binary(op, std::move(lhs), parse_primary());
    }
    return lhs;
  }
  expr parse_primary() {
    const token& t = peek();
    if (t.kind == tok::number || (t.kind == tok::punct && t.text == "-" && peek(1).kind == tok::number)) {
      bool negative = t.kind == tok::punct;
      if (negative) {
        advance();
      }
      const token& num = advance();
      std::string digits = (negative ? "-" : "") + num.text;
      std::int64_t value = 0;
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
      if (ec != std::errc() || ptr != digits.data() + digits.size()) {
        fail(num, "integer literal out of 64-bit range");
      }
      return make_num(value);
    }
    if (accept("(")) {
      auto e = parse_expr();
      expect(")");
      return e;
    }
    auto name = expect_name("expression");
    if (is_punct("(")) {
      return make_call(std::move(name), parse_args());
    }
    return make_var(std::move(name));
  }

  std::vector<token> toks_;
  std::size_t pos_ = 0;
};

void collect_labels(const std::vector<stmt>& body, std::vector<label>& out) {
  for (const auto& s : body) {
    if (const auto* e = std::get_if<extend_stmt>(&s.node)) {
      out.insert(out.end(), e->labels.begin(), e->labels.end());
    } else if (const auto* i = std::get_if<if_stmt>(&s.node)) {
      collect_labels(i->body, out);
    }
  }
}

void validate(const program& p) {
  std::set<std::string> seen;
  for (const auto& g : p.globals) {
    if (!seen.insert(g).second) {
      throw program_error(fault::invalid_program, "variable '" + g + "' declared twice");
    }
  }
  std::set<std::string> fnames;
  std::vector<label> labels;
  for (const auto& f : p.functions) {
    if (!fnames.insert(f.name).second) {
      throw program_error(fault::invalid_program, "function '" + f.name + "' declared twice");
    }
    std::set<std::string> params;
    for (const auto& x : f.params) {
      if (!params.insert(x).second) {
        throw program_error(fault::invalid_program,
                            "parameter '" + x + "' repeated in '" + f.name + "'");
      }
    }
    collect_labels(f.body, labels);
  }
  if (p.find_function(p.entry) == nullptr) {
    throw program_error(fault::unknown_function, "entry function '" + p.entry + "' is not declared");
  }
  std::set<label> unique;
  for (const auto& l : labels) {
    if (!unique.insert(l).second) {
      throw program_error(fault::duplicate_label, "label '" + l.name + "' is used more than once");
    }
  }
}

const char* op_text(binop op) {
  switch (op) {
    case binop::add: return "+";
    case binop::sub: return "-";
    case binop::eq: return "==";
    case binop::lt: return "<";
  }
  return "?";
}

void emit_expr(std::ostream& os, const expr& e) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, numeral>) {
          os << n.value;
        } else if constexpr (std::is_same_v<T, var_ref>) {
          os << n.name;
        } else if constexpr (std::is_same_v<T, call_expr>) {
          os << n.function << '(';
          for (std::size_t i = 0; i < n.args.size(); ++i) {
            os << (i ? ", " : "");
            emit_expr(os, n.args[i]);
          }
          os << ')';
        } else {
          auto side = [&](const expr& child) {
            bool wrap = std::holds_alternative<binary_expr>(child.node);
            os << (wrap ? "(" : "");
            emit_expr(os, child);
            os << (wrap ? ")" : "");
          };
          side(*n.lhs);
          os << ' ' << op_text(n.op) << ' ';
          side(*n.rhs);
        }
      },
      e.node);
}

void emit_stmts(std::ostream& os, const std::vector<stmt>& body, int depth) {
  std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  for (const auto& s : body) {
    os << indent;
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, skip_stmt>) {
            os << "skip";
          } else if constexpr (std::is_same_v<T, assign_stmt>) {
            os << n.target << " := ";
            emit_expr(os, n.value);
          } else if constexpr (std::is_same_v<T, if_stmt>) {
            os << "if ";
            emit_expr(os, n.condition);
            os << " then {\n";
            emit_stmts(os, n.body, depth + 1);
            os << indent << '}';
          } else {
            os << "extend{";
            for (std::size_t i = 0; i < n.labels.size(); ++i) {
              os << (i ? ", " : "") << n.labels[i].name;
            }
            os << '}';
          }
        },
        s.node);
    os << ";\n";
  }
}

}  // namespace

program parse_program(std::string_view source) {
  auto tokens = lexer(source).run();
  auto p = parser(std::move(tokens)).parse();
  validate(p);
  return p;
}

program load_program_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open '" + path + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_program(buf.str());
}

std::string to_source(const expr& e) {
  std::ostringstream os;
  emit_expr(os, e);
  return os.str();
}

std::string to_source(const program& p) {
  std::ostringstream os;
  for (const auto& g : p.globals) {
    os << "int " << g << '\n';
  }
  for (const auto& f : p.functions) {
    os << "int " << f.name << '(';
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      os << (i ? ", " : "") << f.params[i];
    }
    os << ") {\n";
    emit_stmts(os, f.body, 1);
    os << "  return ";
    emit_expr(os, f.result);
    os << "\n}\n";
  }
  os << "return " << p.entry << '(';
  for (std::size_t i = 0; i < p.entry_args.size(); ++i) {
    os << (i ? ", " : "");
    emit_expr(os, p.entry_args[i]);
  }
  os << ")\n";
  return os.str();
}

}  // namespace phd::host
