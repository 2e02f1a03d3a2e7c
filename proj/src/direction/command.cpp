#include "phd/direction/command.hpp"

namespace phd::direction {

namespace {

std::string index_text(const casp::index& i) {
  if (const auto* n = std::get_if<std::int64_t>(&i)) return std::to_string(*n);
  return std::get<casp::counter_ref>(i).name;
}

std::string when_text(const condition& c) {
  if (c.always()) return "";
  return " when " + index_text(c.equals->first) + "=" + index_text(c.equals->second);
}

}  // namespace

condition when_equal(casp::index lhs, casp::index rhs) {
  return condition{std::make_pair(std::move(lhs), std::move(rhs))};
}

std::string_view to_string(count_kind kind) {
  switch (kind) {
    case count_kind::reads: return "reads";
    case count_kind::writes: return "writes";
    case count_kind::calls: return "calls";
  }
  return "?";
}

std::string_view to_string(ctl_op op) {
  switch (op) {
    case ctl_op::stop: return "stop";
    case ctl_op::clear: return "clear";
    case ctl_op::print: return "print";
    case ctl_op::full: return "full";
  }
  return "?";
}

std::string to_text(const command& c) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, print_cmd>) {
          return "print " + x.var;
        } else if constexpr (std::is_same_v<T, break_cmd>) {
          return "break " + x.where + when_text(x.when);
        } else if constexpr (std::is_same_v<T, unbreak_cmd>) {
          return "unbreak " + x.where;
        } else if constexpr (std::is_same_v<T, watch_cmd>) {
          return "watch " + x.var + when_text(x.when);
        } else if constexpr (std::is_same_v<T, unwatch_cmd>) {
          return "unwatch " + x.var;
        } else if constexpr (std::is_same_v<T, trace_start_cmd>) {
          return "trace start " + x.var + when_text(x.when) + " max " + std::to_string(x.budget);
        } else if constexpr (std::is_same_v<T, trace_ctl_cmd>) {
          return "trace " + std::string(to_string(x.op)) + " " + x.var;
        } else if constexpr (std::is_same_v<T, count_start_cmd>) {
          return "count " + std::string(to_string(x.kind)) + " " + x.target + when_text(x.when) +
                 " max " + std::to_string(x.budget);
        } else if constexpr (std::is_same_v<T, count_ctl_cmd>) {
          std::string out = "count " + std::string(to_string(x.op)) + " ";
          if (x.kind) out += std::string(to_string(*x.kind)) + " ";
          return out + x.target;
        } else if constexpr (std::is_same_v<T, resume_cmd>) {
          return "continue";
        } else {
          return "exec " + casp::serialize(x.program);
        }
      },
      c);
}

bool is_establishing(const command& c) {
  return std::holds_alternative<break_cmd>(c) || std::holds_alternative<watch_cmd>(c) ||
         std::holds_alternative<trace_start_cmd>(c) || std::holds_alternative<count_start_cmd>(c);
}

}  // namespace phd::direction
