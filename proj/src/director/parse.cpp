#include "phd/director/parse.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <vector>

namespace phd::director {

using namespace direction;

namespace {

constexpr std::string_view usage_text =
    "commands:\n"
    "  print X\n"
    "  break F/I [when V=N]      break L [when V=N]      unbreak L|F/I\n"
    "  watch X [when V=N]        unwatch X\n"
    "  trace start X [when V=N] max N\n"
    "  trace stop|clear|print|full X\n"
    "  count reads|writes|calls T [when V=N] max N\n"
    "  count stop|clear|print|full [reads|writes|calls] T\n"
    "  continue\n"
    "  exec <controller program>";

[[noreturn]] void bad(const std::string& why) {
  throw usage_error(why + "\n" + std::string(usage_text));
}

std::vector<std::string> tokens(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      flush();
    } else if (c == '=') {
      flush();
      if (i + 1 < line.size() && line[i + 1] == '=') ++i;
      out.emplace_back("=");
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

std::optional<std::int64_t> as_int(const std::string& s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

class reader {
 public:
  explicit reader(std::vector<std::string> t) : t_(std::move(t)) {}

  bool done() const { return i_ >= t_.size(); }
  const std::string* peek() const { return done() ? nullptr : &t_[i_]; }

  std::string take(const char* what) {
    if (done()) bad(std::string("missing ") + what);
    return t_[i_++];
  }

  std::string name(const char* what) {
    auto s = take(what);
    if (!is_identifier(s)) bad("'" + s + "' is not a valid " + what);
    return s;
  }

  casp::index index() {
    auto s = take("value");
    if (auto n = as_int(s)) return *n;
    if (!is_identifier(s)) bad("'" + s + "' is neither a number nor a variable");
    return casp::counter_ref{s};
  }

  condition when() {
    if (!peek() || *peek() != "when") return {};
    ++i_;
    auto lhs = index();
    if (take("'='") != "=") bad("expected '=' in condition");
    auto rhs = index();
    return when_equal(lhs, rhs);
  }

  std::uint64_t budget() {
    if (take("'max'") != "max") bad("expected 'max N'");
    auto s = take("budget");
    auto n = as_int(s);
    if (!n || *n <= 0) bad("budget must be a positive number, got '" + s + "'");
    return static_cast<std::uint64_t>(*n);
  }

  void end() {
    if (!done()) bad("unexpected '" + t_[i_] + "'");
  }

 private:
  std::vector<std::string> t_;
  std::size_t i_ = 0;
};

std::optional<ctl_op> ctl(const std::string& s) {
  if (s == "stop") return ctl_op::stop;
  if (s == "clear") return ctl_op::clear;
  if (s == "print") return ctl_op::print;
  if (s == "full") return ctl_op::full;
  return std::nullopt;
}

std::optional<count_kind> kind(const std::string& s) {
  if (s == "reads") return count_kind::reads;
  if (s == "writes") return count_kind::writes;
  if (s == "calls") return count_kind::calls;
  return std::nullopt;
}

std::string where(reader& r) {
  auto s = r.take("position or label");
  if (s.find('/') == std::string::npos && !is_identifier(s)) {
    bad("'" + s + "' is neither a position F/I nor a label");
  }
  return s;
}

}  // namespace

std::string_view usage() { return usage_text; }

command parse_direction(std::string_view line) {
  auto first = line.find_first_not_of(" \t");
  if (first == std::string_view::npos) bad("empty command");
  line.remove_prefix(first);
  if (line.substr(0, 4) == "exec" && (line.size() == 4 || line[4] == ' ' || line[4] == '\t')) {
    auto text = line.substr(4);
    try {
      return exec_cmd{casp::parse(text)};
    } catch (const casp::casp_error& e) {
      bad(std::string("exec: ") + e.what());
    }
  }
  reader r(tokens(line));
  auto verb = r.take("command");
  command out;
  if (verb == "print") {
    out = print_cmd{r.name("variable")};
  } else if (verb == "break") {
    auto w = where(r);
    out = break_cmd{w, r.when()};
  } else if (verb == "unbreak") {
    out = unbreak_cmd{where(r)};
  } else if (verb == "watch") {
    auto x = r.name("variable");
    out = watch_cmd{x, r.when()};
  } else if (verb == "unwatch") {
    out = unwatch_cmd{r.name("variable")};
  } else if (verb == "trace") {
    auto sub = r.take("trace subcommand");
    if (sub == "start") {
      auto x = r.name("variable");
      auto w = r.when();
      out = trace_start_cmd{x, w, r.budget()};
    } else if (auto op = ctl(sub)) {
      out = trace_ctl_cmd{*op, r.name("variable")};
    } else {
      bad("unknown trace subcommand '" + sub + "'");
    }
  } else if (verb == "count") {
    auto sub = r.take("count subcommand");
    if (auto k = kind(sub)) {
      auto t = r.name("target");
      auto w = r.when();
      out = count_start_cmd{*k, t, w, r.budget()};
    } else if (auto op = ctl(sub)) {
      std::optional<count_kind> k;
      auto t = r.name("target");
      if (auto named = kind(t); named && !r.done()) {
        k = named;
        t = r.name("target");
      }
      out = count_ctl_cmd{*op, k, t};
    } else {
      bad("unknown count subcommand '" + sub + "'");
    }
  } else if (verb == "continue") {
    out = resume_cmd{};
  } else {
    bad("unknown command '" + verb + "'");
  }
  r.end();
  return out;
}

std::vector<command> parse_script(std::istream& in) {
  std::vector<command> out;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      out.push_back(parse_direction(line));
    } catch (const usage_error& e) {
      std::string what = e.what();
      throw usage_error("line " + std::to_string(n) + ": " + what.substr(0, what.find('\n')));
    }
  }
  return out;
}

std::vector<command> load_script(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw usage_error("cannot open '" + path + "'");
  return parse_script(in);
}

}  // namespace phd::director
