#include "phd/direction/compiler.hpp"

#include <algorithm>

namespace phd::direction {

using casp::counter_ref;
using casp::make_continue;
using casp::program;

namespace {

[[noreturn]] void rethrow_as_premise(const host::program_error& e) {
  switch (e.kind()) {
    case host::fault::label_exists: throw direction_error(premise::label_exists, e.what());
    case host::fault::position_not_extend:
      throw direction_error(premise::position_not_extend, e.what());
    case host::fault::invalid_position: throw direction_error(premise::invalid_position, e.what());
    case host::fault::unknown_variable: throw direction_error(premise::unknown_variable, e.what());
    default: throw direction_error(premise::unknown_target, e.what());
  }
}

void require_var(const host::program& p, const std::string& x) {
  if (!host::vars(p).count(x)) {
    throw direction_error(premise::unknown_variable, "'" + x + "' is not a declared variable");
  }
}

void require_condition(const host::program& p, const condition& when) {
  if (when.always()) return;
  for (const auto* side : {&when.equals->first, &when.equals->second}) {
    if (const auto* c = std::get_if<counter_ref>(side)) require_var(p, c->name);
  }
}

void require_budget(std::uint64_t budget, std::uint64_t cap, const char* what) {
  if (budget == 0 || budget > cap) {
    throw direction_error(premise::budget, std::string(what) + " budget " + std::to_string(budget) +
                                               " must be between 1 and " + std::to_string(cap));
  }
}

casp::value as_value(const casp::index& i) {
  if (const auto* n = std::get_if<std::int64_t>(&i)) return *n;
  return std::get<counter_ref>(i);
}

exchange place(const label& l, const program& body) {
  return {casp::make_place(l, body), reply_check::label_code, l, std::nullopt};
}

exchange query(casp::value v) { return {casp::make_value(std::move(v)), reply_check::any, {}, {}}; }

exchange reset(const std::string& a, const std::string& b) {
  auto zero = casp::plain_expr{std::int64_t{0}};
  return {casp::make_seq(casp::make_assign(counter_ref{a}, zero), casp::make_assign(counter_ref{b}, zero)),
          reply_check::zero, {}, {}};
}

std::set<host::position> positions_for(const host::program& p, host::placement_kind kind,
                                       const std::string& target) {
  try {
    return host::placement_positions(p, kind, target);
  } catch (const host::program_error& e) {
    if (kind == host::placement_kind::call_entry) {
      throw direction_error(premise::unknown_target, "'" + target + "' is not a declared function");
    }
    rethrow_as_premise(e);
  }
}

// `<subject>__<tag><k>` with k the ordinal of the position.
std::map<label, host::position> fresh_labels(const std::set<host::position>& at,
                                             const std::string& subject, const std::string& tag) {
  std::map<label, host::position> out;
  std::size_t k = 0;
  for (const auto& pos : at) out.emplace(label(subject + "__" + tag + std::to_string(k++)), pos);
  return out;
}

std::string count_tag(count_kind kind) {
  switch (kind) {
    case count_kind::reads: return "cr";
    case count_kind::writes: return "cw";
    case count_kind::calls: return "cc";
  }
  return "c";
}

host::placement_kind placement_for(count_kind kind) {
  switch (kind) {
    case count_kind::reads: return host::placement_kind::post_read;
    case count_kind::writes: return host::placement_kind::post_update;
    case count_kind::calls: return host::placement_kind::call_entry;
  }
  return host::placement_kind::post_update;
}

std::map<label, host::position> trace_labels(const host::program& p, const std::string& x) {
  return fresh_labels(positions_for(p, host::placement_kind::post_update, x), x, "t");
}

std::map<label, host::position> watch_labels(const host::program& p, const std::string& x) {
  return fresh_labels(positions_for(p, host::placement_kind::post_update, x), x, "w");
}

std::map<label, host::position> count_labels(const host::program& p, count_kind kind,
                                             const std::string& target) {
  return fresh_labels(positions_for(p, placement_for(kind), target), target, count_tag(kind));
}

// Delta that parks every label back on `continue` and clears the fact bit.
directability_delta unset(const std::map<label, host::position>& labels, const fact_ledger& facts,
                          const std::string& tag, const std::string& subject,
                          const std::string& what) {
  if (!facts.bit(tag, subject)) {
    throw direction_error(premise::missing_capability, what + " was never started");
  }
  directability_delta d;
  d.fact = director_fact{tag, subject, false};
  for (const auto& [l, pos] : labels) d.script.push_back(place(l, make_continue()));
  return d;
}

void require_fact(const fact_ledger& facts, const std::string& tag, const std::string& subject,
                  const std::string& what) {
  if (!facts.bit(tag, subject)) {
    throw direction_error(premise::missing_capability, what + " was never started");
  }
}

count_kind resolve_kind(const fact_ledger& facts, const count_ctl_cmd& c) {
  if (c.kind) return *c.kind;
  std::vector<count_kind> found;
  for (auto k : {count_kind::reads, count_kind::writes, count_kind::calls}) {
    if (facts.bit(tag_count, count_subject(k, c.target))) found.push_back(k);
  }
  if (found.empty()) {
    throw direction_error(premise::missing_capability, "no count was started on '" + c.target + "'");
  }
  if (found.size() > 1) {
    throw direction_error(premise::not_allowed,
                          "several counts run on '" + c.target + "'; name reads, writes or calls");
  }
  return found.front();
}

std::string break_label_for(const host::program& p, const std::string& where) {
  if (where.find('/') != std::string::npos) return breakpoint_label(p, breakpoint_extend(p, where));
  return where;
}

}  // namespace

std::string_view to_string(premise p) {
  switch (p) {
    case premise::unknown_variable: return "unknown-variable";
    case premise::unknown_target: return "unknown-target";
    case premise::invalid_position: return "invalid-position";
    case premise::missing_capability: return "missing-capability";
    case premise::fact_exists: return "fact-exists";
    case premise::budget: return "budget-exceeds-capacity";
    case premise::label_exists: return "label-exists";
    case premise::position_not_extend: return "position-not-extend";
    case premise::state_exists: return "state-exists";
    case premise::not_prepared: return "not-prepared";
    case premise::not_allowed: return "not-allowed";
  }
  return "premise";
}

std::optional<bool> fact_ledger::bit(const std::string& tag, const std::string& subject) const {
  auto it = bits_.find({tag, subject});
  if (it == bits_.end()) return std::nullopt;
  return it->second;
}

void fact_ledger::set(const director_fact& f) { bits_[{f.tag, f.subject}] = f.bit; }

std::vector<director_fact> fact_ledger::facts() const {
  std::vector<director_fact> out;
  for (const auto& [key, b] : bits_) out.push_back({key.first, key.second, b});
  return out;
}

bool fact_ledger::any_active() const {
  return std::any_of(bits_.begin(), bits_.end(), [](const auto& kv) { return kv.second; });
}

bool directability_delta::needs_interactive() const {
  return std::any_of(script.begin(), script.end(),
                     [](const exchange& e) { return casp::contains_placement(e.program); });
}

casp::program compile_condition(const condition& when, casp::program then) {
  if (when.always()) return then;
  casp::compare_expr test{casp::compare_op::eq, as_value(when.equals->first),
                          as_value(when.equals->second)};
  return casp::make_ite(test, std::move(then), make_continue());
}

std::string trace_index_name(const std::string& var) { return var + "_i"; }
std::string trace_overflow_name(const std::string& var) { return var + "_of"; }
std::string trace_array_name(const std::string& var) { return var + "_a"; }

std::string count_counter_name(count_kind kind, const std::string& target) {
  return target + "_" + std::string(to_string(kind)) + "_count";
}

std::string count_overflow_name(count_kind kind, const std::string& target) {
  return target + "_" + std::string(to_string(kind)) + "_of";
}

std::string count_subject(count_kind kind, const std::string& target) {
  return std::string(to_string(kind)) + ":" + target;
}

casp::program trace_body(const std::string& var, std::uint64_t budget) {
  counter_ref i{trace_index_name(var)};
  counter_ref of{trace_overflow_name(var)};
  auto limit = static_cast<std::int64_t>(budget);
  return casp::make_ite(
      casp::compare_expr{casp::compare_op::lt, i, limit},
      casp::make_seq({casp::make_assign(casp::cell_ref{trace_array_name(var), i},
                                        casp::plain_expr{counter_ref{var}}),
                      casp::make_step(casp::step_op::inc, i), make_continue()}),
      casp::make_seq(casp::make_step(casp::step_op::inc, of), casp::make_break()));
}

casp::program count_body(const std::string& counter, const std::string& overflow,
                         std::uint64_t budget) {
  counter_ref n{counter};
  return casp::make_ite(
      casp::compare_expr{casp::compare_op::lt, n, static_cast<std::int64_t>(budget)},
      casp::make_seq(casp::make_step(casp::step_op::inc, n), make_continue()),
      casp::make_seq(casp::make_step(casp::step_op::inc, counter_ref{overflow}), casp::make_break()));
}

std::string breakpoint_label(const host::program& p, const host::position& at) {
  std::string out = p.functions.at(at.path.at(0)).name + "__bp";
  for (std::size_t i = 1; i < at.path.size(); ++i) {
    if (i > 1) out += "_";
    out += std::to_string(at.path[i]);
  }
  return out;
}

host::position breakpoint_extend(const host::program& p, const std::string& where) {
  host::position pos;
  try {
    pos = host::parse_position(p, where);
  } catch (const host::program_error& e) {
    if (e.kind() == host::fault::unknown_function) {
      throw direction_error(premise::invalid_position, e.what());
    }
    rethrow_as_premise(e);
  }
  auto is_extend = [&](const host::position& at) {
    try {
      return host::stmt_at(p, at).is_extend();
    } catch (const host::program_error&) {
      return false;
    }
  };
  if (is_extend(pos)) return pos;
  if (!host::positions(p).count(pos)) {
    throw direction_error(premise::invalid_position, "'" + where + "' is not a position of the program");
  }
  if (pos.path.back() > 0) {
    auto before = pos;
    --before.path.back();
    if (is_extend(before)) return before;
  }
  throw direction_error(premise::position_not_extend,
                        "no extension point precedes '" + where + "'");
}

directability_delta compile_break(const compile_context& cx, const break_cmd& c) {
  require_condition(cx.program, c.when);
  directability_delta d;
  label l(c.where);
  if (c.where.find('/') != std::string::npos) {
    auto at = breakpoint_extend(cx.program, c.where);
    l = label(breakpoint_label(cx.program, at));
    d.program_edit.emplace(l, at);
  } else if (!is_identifier(c.where) || !host::contains_label(cx.program, l)) {
    throw direction_error(premise::unknown_target,
                          "'" + c.where + "' is neither a position nor a label of the program");
  }
  auto body = compile_condition(c.when, casp::make_break());
  d.controller.procedures.emplace(l, body);
  d.fact = director_fact{tag_breakpoint, l.name, true};
  d.establishes = true;
  d.script.push_back(place(l, body));
  return d;
}

directability_delta compile_unset(const compile_context& cx, const command& c) {
  if (const auto* u = std::get_if<unbreak_cmd>(&c)) {
    label l(break_label_for(cx.program, u->where));
    if (!cx.facts.bit(tag_breakpoint, l.name)) {
      throw direction_error(premise::missing_capability, "no breakpoint '" + l.name + "' was set");
    }
    directability_delta d;
    d.fact = director_fact{tag_breakpoint, l.name, false};
    d.script.push_back(place(l, make_continue()));
    return d;
  }
  if (const auto* u = std::get_if<unwatch_cmd>(&c)) {
    return unset(watch_labels(cx.program, u->var), cx.facts, tag_watch, u->var, "watch on " + u->var);
  }
  if (const auto* t = std::get_if<trace_ctl_cmd>(&c); t && t->op == ctl_op::stop) {
    return unset(trace_labels(cx.program, t->var), cx.facts, tag_trace, t->var, "trace on " + t->var);
  }
  if (const auto* n = std::get_if<count_ctl_cmd>(&c); n && n->op == ctl_op::stop) {
    auto kind = resolve_kind(cx.facts, *n);
    return unset(count_labels(cx.program, kind, n->target), cx.facts, tag_count,
                 count_subject(kind, n->target), "count of " + count_subject(kind, n->target));
  }
  throw direction_error(premise::not_allowed, "'" + to_text(c) + "' does not deactivate anything");
}

directability_delta compile_print(const compile_context& cx, const print_cmd& c) {
  require_var(cx.program, c.var);
  if (cx.strict && !cx.facts.any_active()) {
    throw direction_error(premise::missing_capability,
                          "strict directability: print needs an active breakpoint or watch");
  }
  directability_delta d;
  d.script.push_back(query(counter_ref{c.var}));
  return d;
}

directability_delta compile_trace_start(const compile_context& cx, const trace_start_cmd& c) {
  require_var(cx.program, c.var);
  require_condition(cx.program, c.when);
  require_budget(c.budget, cx.caps.trace_cap, "trace");
  directability_delta d;
  d.program_edit = trace_labels(cx.program, c.var);
  d.controller.counters = {{trace_index_name(c.var), 0}, {trace_overflow_name(c.var), 0}};
  d.controller.arrays = {{trace_array_name(c.var), static_cast<std::size_t>(c.budget)}};
  auto body = compile_condition(c.when, trace_body(c.var, c.budget));
  for (const auto& [l, pos] : d.program_edit) {
    d.controller.procedures.emplace(l, body);
    d.script.push_back(place(l, body));
  }
  d.fact = director_fact{tag_trace, c.var, true};
  d.establishes = true;
  return d;
}

directability_delta compile_trace_ctl(const compile_context& cx, const trace_ctl_cmd& c) {
  if (c.op == ctl_op::stop) return compile_unset(cx, c);
  require_fact(cx.facts, tag_trace, c.var, "trace on " + c.var);
  directability_delta d;
  switch (c.op) {
    case ctl_op::clear:
      d.script.push_back(reset(trace_index_name(c.var), trace_overflow_name(c.var)));
      break;
    case ctl_op::full: d.script.push_back(query(counter_ref{trace_overflow_name(c.var)})); break;
    case ctl_op::print: {
      auto e = query(counter_ref{trace_index_name(c.var)});
      e.dump_array = trace_array_name(c.var);
      d.script.push_back(std::move(e));
      break;
    }
    case ctl_op::stop: break;
  }
  return d;
}

directability_delta compile_watch(const compile_context& cx, const watch_cmd& c) {
  require_var(cx.program, c.var);
  require_condition(cx.program, c.when);
  directability_delta d;
  d.program_edit = watch_labels(cx.program, c.var);
  auto body = compile_condition(c.when, casp::make_break());
  for (const auto& [l, pos] : d.program_edit) {
    d.controller.procedures.emplace(l, body);
    d.script.push_back(place(l, body));
  }
  d.fact = director_fact{tag_watch, c.var, true};
  d.establishes = true;
  return d;
}

directability_delta compile_count_start(const compile_context& cx, const count_start_cmd& c) {
  if (c.kind != count_kind::calls) require_var(cx.program, c.target);
  require_condition(cx.program, c.when);
  require_budget(c.budget, cx.caps.count_cap, "count");
  directability_delta d;
  d.program_edit = count_labels(cx.program, c.kind, c.target);
  auto counter = count_counter_name(c.kind, c.target);
  auto overflow = count_overflow_name(c.kind, c.target);
  d.controller.counters = {{counter, 0}, {overflow, 0}};
  auto body = compile_condition(c.when, count_body(counter, overflow, c.budget));
  for (const auto& [l, pos] : d.program_edit) {
    d.controller.procedures.emplace(l, body);
    d.script.push_back(place(l, body));
  }
  d.fact = director_fact{tag_count, count_subject(c.kind, c.target), true};
  d.establishes = true;
  return d;
}

directability_delta compile_count_ctl(const compile_context& cx, const count_ctl_cmd& c) {
  if (c.op == ctl_op::stop) return compile_unset(cx, c);
  auto kind = resolve_kind(cx.facts, c);
  require_fact(cx.facts, tag_count, count_subject(kind, c.target),
               "count of " + count_subject(kind, c.target));
  auto counter = count_counter_name(kind, c.target);
  auto overflow = count_overflow_name(kind, c.target);
  directability_delta d;
  switch (c.op) {
    case ctl_op::clear: d.script.push_back(reset(counter, overflow)); break;
    case ctl_op::full: d.script.push_back(query(counter_ref{overflow})); break;
    case ctl_op::print: d.script.push_back(query(counter_ref{counter})); break;
    case ctl_op::stop: break;
  }
  return d;
}

directability_delta compile_exec(const exec_cmd& c) {
  directability_delta d;
  d.script.push_back({c.program, reply_check::any, {}, {}});
  return d;
}

directability_delta compile_resume() {
  directability_delta d;
  d.script.push_back({make_continue(), reply_check::any, {}, {}});
  return d;
}

directability_delta compile(const compile_context& cx, const command& c) {
  return std::visit(
      [&](const auto& x) -> directability_delta {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, print_cmd>) return compile_print(cx, x);
        else if constexpr (std::is_same_v<T, break_cmd>) return compile_break(cx, x);
        else if constexpr (std::is_same_v<T, unbreak_cmd> || std::is_same_v<T, unwatch_cmd>)
          return compile_unset(cx, x);
        else if constexpr (std::is_same_v<T, watch_cmd>) return compile_watch(cx, x);
        else if constexpr (std::is_same_v<T, trace_start_cmd>) return compile_trace_start(cx, x);
        else if constexpr (std::is_same_v<T, trace_ctl_cmd>) return compile_trace_ctl(cx, x);
        else if constexpr (std::is_same_v<T, count_start_cmd>) return compile_count_start(cx, x);
        else if constexpr (std::is_same_v<T, count_ctl_cmd>) return compile_count_ctl(cx, x);
        else if constexpr (std::is_same_v<T, resume_cmd>) return compile_resume();
        else return compile_exec(x);
      },
      c);
}

casp::machine_state initial_state(const host::program& p) {
  casp::machine_state s;
  for (const auto& g : p.globals) s.add_counter(g, 0);
  return s;
}

directable apply_delta(const directable& x, const directability_delta& d) {
  directable out{x.program, x.state, x.facts};
  if (d.fact) {
    auto existing = x.facts.bit(d.fact->tag, d.fact->subject);
    if (d.establishes && existing) {
      throw direction_error(premise::fact_exists,
                            "fact " + d.fact->tag + " " + d.fact->subject + " already exists");
    }
    if (!d.establishes && !existing) {
      throw direction_error(premise::missing_capability,
                            "no fact " + d.fact->tag + " " + d.fact->subject + " to change");
    }
    out.facts.set(*d.fact);
  }
  try {
    out.program = host::insert_labels(x.program, d.program_edit);
  } catch (const host::program_error& e) {
    rethrow_as_premise(e);
  }
  auto taken = [&](const std::string& name) {
    if (out.state.has_name(name)) {
      throw direction_error(premise::state_exists, "controller state '" + name + "' already exists");
    }
  };
  for (const auto& [name, v] : d.controller.counters) {
    taken(name);
    out.state.add_counter(name, v);
  }
  for (const auto& [name, cap] : d.controller.arrays) {
    taken(name);
    out.state.add_array(name, cap);
  }
  for (const auto& [l, body] : d.controller.procedures) {
    if (!d.establishes) break;
    if (out.state.procedures.count(l)) {
      throw direction_error(premise::state_exists, "stored procedure '" + l.name + "' already exists");
    }
    out.state.procedures.emplace(l, body);
  }
  return out;
}

bool check_disjoint(const directability_delta& a, const directability_delta& b) {
  auto names = [](const directability_delta& d) {
    std::set<std::string> out;
    for (const auto& [l, pos] : d.program_edit) out.insert("label:" + l.name);
    for (const auto& [n, v] : d.controller.counters) out.insert("state:" + n);
    for (const auto& [n, v] : d.controller.arrays) out.insert("state:" + n);
    for (const auto& [l, body] : d.controller.procedures) out.insert("proc:" + l.name);
    if (d.fact) out.insert("fact:" + d.fact->tag + " " + d.fact->subject);
    return out;
  };
  auto x = names(a);
  auto y = names(b);
  return std::none_of(x.begin(), x.end(), [&](const std::string& n) { return y.count(n) > 0; });
}

casp::label_codec make_codec(const host::program& image) {
  casp::label_codec codec;
  for (const auto& l : host::program_labels(image)) codec.add(l);
  codec.add(session_label);
  codec.add(exit_label);
  return codec;
}

preparation prepare(const host::program& source, std::span<const command> commands,
                    const limits& caps) {
  for (const auto& l : host::program_labels(source)) {
    if (l == session_label || l == exit_label) {
      throw direction_error(premise::label_exists, "'" + l.name + "' is reserved");
    }
  }
  directable x{host::normalize(source), {}, {}};
  x.state = initial_state(x.program);
  fact_ledger none;
  for (const auto& c : commands) {
    if (!is_establishing(c)) {
      throw direction_error(premise::not_allowed,
                            "'" + to_text(c) + "' cannot be prepared; only break, watch, trace "
                            "start and count start can");
    }
    auto d = compile(compile_context{x.program, none, caps, false}, c);
    d.fact.reset();
    for (auto& [l, body] : d.controller.procedures) body = make_continue();
    x = apply_delta(x, d);
  }
  preparation prep;
  prep.source = source;
  prep.image = std::move(x.program);
  prep.state = std::move(x.state);
  prep.codec = make_codec(prep.image);
  prep.prepared.assign(commands.begin(), commands.end());
  prep.caps = caps;
  return prep;
}

void check_prepared(const preparation& prep, const directability_delta& d) {
  auto missing = [](const std::string& what) {
    throw direction_error(premise::not_prepared,
                          what + " was not prepared at load; list the command in the predirect file");
  };
  for (const auto& [l, pos] : d.program_edit) {
    if (host::label_positions(prep.image, {l}) != std::set<host::position>{pos}) {
      missing("label '" + l.name + "'");
    }
  }
  for (const auto& [name, v] : d.controller.counters) {
    if (!prep.state.counters.count(name)) missing("counter '" + name + "'");
  }
  for (const auto& [name, cap] : d.controller.arrays) {
    auto it = prep.state.arrays.find(name);
    if (it == prep.state.arrays.end()) missing("array '" + name + "'");
    if (it->second.size() < cap) {
      throw direction_error(premise::budget, "budget " + std::to_string(cap) +
                                                 " exceeds the prepared capacity " +
                                                 std::to_string(it->second.size()) + " of '" +
                                                 name + "'");
    }
  }
  for (const auto& [l, body] : d.controller.procedures) {
    if (!prep.codec.contains(l)) missing("label '" + l.name + "'");
  }
}

}  // namespace phd::direction
