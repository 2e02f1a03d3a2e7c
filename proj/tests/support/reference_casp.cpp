#include "reference.hpp"

namespace phd::oracle {

namespace {

struct fault {
  int code;
};

using state = casp::machine_state;

std::int64_t lookup_counter(const state& s, const std::string& x) {
  auto it = s.counters.find(x);
  if (it == s.counters.end()) throw fault{5};
  return it->second;
}

std::int64_t eval_index(const state& s, const casp::index& i) {
  if (i.index() == 0) return std::get<0>(i);
  return lookup_counter(s, std::get<casp::counter_ref>(i).name);
}

std::pair<std::string, std::size_t> locate(const state& s, const casp::cell_ref& c) {
  auto it = s.arrays.find(c.array);
  if (it == s.arrays.end()) throw fault{5};
  std::int64_t n = eval_index(s, c.at);
  if (n < 0 || n >= static_cast<std::int64_t>(it->second.size())) throw fault{6};
  return {c.array, static_cast<std::size_t>(n)};
}

std::int64_t eval_value(const state& s, const casp::value& v) {
  switch (v.index()) {
    case 0: return std::get<0>(v);
    case 1: return lookup_counter(s, std::get<1>(v).name);
    default: {
      auto [a, i] = locate(s, std::get<2>(v));
      return s.arrays.at(a)[i];
    }
  }
}

std::int64_t eval_expr(const state& s, const casp::expr& e) {
  switch (e.index()) {
    case 0: return eval_value(s, std::get<0>(e).v);
    case 1: {
      // -N computed through unsigned arithmetic so INT64_MIN wraps.
      std::uint64_t u = static_cast<std::uint64_t>(eval_value(s, std::get<1>(e).v));
      return static_cast<std::int64_t>(~u + 1u);
    }
    default: {
      const auto& c = std::get<2>(e);
      std::int64_t a = eval_value(s, c.lhs);
      std::int64_t b = eval_value(s, c.rhs);
      bool r = c.op == casp::compare_op::eq ? (a == b) : (a < b);
      return r ? 1 : -1;
    }
  }
}

state write(state s, const casp::updatable& u, std::int64_t n) {
  if (u.index() == 0) {
    const auto& x = std::get<0>(u).name;
    lookup_counter(s, x);
    s.counters[x] = n;
  } else {
    auto [a, i] = locate(s, std::get<1>(u));
    s.arrays[a][i] = n;
  }
  return s;
}

std::int64_t read(const state& s, const casp::updatable& u) {
  if (u.index() == 0) return lookup_counter(s, std::get<0>(u).name);
  auto [a, i] = locate(s, std::get<1>(u));
  return s.arrays.at(a)[i];
}

struct config {
  state s;
  bool interactive;
  std::int64_t n;
};

std::int64_t code_of(const std::map<std::string, std::int64_t>& codes, const std::string& l) {
  auto it = codes.find(l);
  if (it == codes.end()) throw fault{2};
  return it->second;
}

bool has_place(const casp::program& p) {
  switch (p.node.index()) {
    case 3: {
      const auto& q = std::get<casp::seq_prog>(p.node);
      return has_place(*q.first) || has_place(*q.second);
    }
    case 4: {
      const auto& q = std::get<casp::ite_prog>(p.node);
      return has_place(*q.then_branch) || has_place(*q.else_branch);
    }
    case 7: return true;
    default: return false;
  }
}

config go(const std::string& L, const state& s, bool ia, const casp::program& p,
          const std::map<std::string, std::int64_t>& codes) {
  switch (p.node.index()) {
    case 0:  // E
      return {s, ia, eval_expr(s, std::get<casp::expr_prog>(p.node).e)};
    case 1: {  // U := E
      const auto& q = std::get<casp::assign_prog>(p.node);
      std::int64_t n = eval_expr(s, q.e);
      return {write(s, q.target, n), ia, n};
    }
    case 2: {  // inc/dec U
      const auto& q = std::get<casp::step_prog>(p.node);
      std::uint64_t n = static_cast<std::uint64_t>(read(s, q.target));
      std::int64_t m = static_cast<std::int64_t>(q.op == casp::step_op::inc ? n + 1u : n - 1u);
      return {write(s, q.target, m), ia, m};
    }
    case 3: {  // P1; P2
      const auto& q = std::get<casp::seq_prog>(p.node);
      config c1 = go(L, s, ia, *q.first, codes);
      if (c1.interactive != ia) return c1;
      return go(L, c1.s, c1.interactive, *q.second, codes);
    }
    case 4: {  // if
      const auto& q = std::get<casp::ite_prog>(p.node);
      std::int64_t n = eval_expr(s, q.condition);
      if (n == 1) return go(L, s, ia, *q.then_branch, codes);
      if (n == -1) return go(L, s, ia, *q.else_branch, codes);
      throw fault{8};
    }
    case 5:  // break
      return {s, true, code_of(codes, L)};
    case 6:  // continue
      return {s, false, code_of(codes, L)};
    default: {  // @L':{P}
      const auto& q = std::get<casp::place_prog>(p.node);
      if (!ia) throw fault{3};
      if (has_place(*q.body)) throw fault{4};
      std::int64_t code = code_of(codes, q.at.name);
      state t = s;
      t.procedures.insert_or_assign(q.at, *q.body);
      return {t, true, code};
    }
  }
}

}  // namespace

ref_outcome reference_eval(const std::string& context, const casp::machine_state& s,
                           bool interactive, const casp::program& p,
                           const std::map<std::string, std::int64_t>& codes) {
  ref_outcome out;
  try {
    config c = go(context, s, interactive, p, codes);
    out.ok = true;
    out.state = std::move(c.s);
    out.interactive = c.interactive;
    out.value = c.n;
  } catch (const fault& f) {
    out.error = f.code;
  }
  return out;
}

}  // namespace phd::oracle
