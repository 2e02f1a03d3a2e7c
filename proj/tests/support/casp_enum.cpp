#include "casp_enum.hpp"

namespace phd::oracle {

namespace {

using namespace casp;

// Items bucketed by exact depth: at[d] holds everything of depth d.
template <typename T>
using by_depth = std::vector<std::vector<T>>;

template <typename T, typename Fn>
void pairs_up_to(const by_depth<T>& xs, int limit, Fn&& fn) {
  for (int i = 1; i <= limit && i < static_cast<int>(xs.size()); ++i) {
    for (const auto& x : xs[i]) fn(x, i);
  }
}

}  // namespace

std::vector<program> enumerate_casp(int depth, const casp_universe& u) {
  by_depth<value> values(depth + 1);
  by_depth<updatable> targets(depth + 1);
  by_depth<expr> exprs(depth + 1);
  by_depth<program> progs(depth + 1);

  if (depth >= 1) {
    for (auto n : u.constants) values[1].emplace_back(n);
    for (const auto& c : u.counters) {
      values[1].emplace_back(counter_ref{c});
      targets[1].emplace_back(counter_ref{c});
    }
  }
  if (depth >= 2) {
    std::vector<index> indices;
    for (auto n : u.constants) indices.emplace_back(n);
    for (const auto& c : u.counters) indices.emplace_back(counter_ref{c});
    for (const auto& i : indices) {
      values[2].emplace_back(cell_ref{u.array, i});
      targets[2].emplace_back(cell_ref{u.array, i});
    }
  }
  for (int d = 2; d <= depth; ++d) {
    for (const auto& v : values[d - 1]) {
      exprs[d].emplace_back(plain_expr{v});
      exprs[d].emplace_back(negate_expr{v});
    }
    // compare: at least one side has depth d-1.
    for (int i = 1; i < d; ++i) {
      for (int j = 1; j < d; ++j) {
        if (std::max(i, j) != d - 1) continue;
        for (const auto& l : values[i]) {
          for (const auto& r : values[j]) {
            exprs[d].emplace_back(compare_expr{compare_op::eq, l, r});
            exprs[d].emplace_back(compare_expr{compare_op::lt, l, r});
          }
        }
      }
    }
  }

  auto exact = [](int a, int b, int d) { return std::max(a, b) == d - 1; };

  if (depth >= 1) {
    progs[1].push_back(make_break());
    progs[1].push_back(make_continue());
  }
  for (int d = 2; d <= depth; ++d) {
    auto& out = progs[d];
    for (const auto& e : exprs[d - 1]) out.push_back(make_expr(e));
    pairs_up_to(targets, d - 1, [&](const updatable& t, int i) {
      pairs_up_to(exprs, d - 1, [&](const expr& e, int j) {
        if (exact(i, j, d)) out.push_back(make_assign(t, e));
      });
    });
    for (const auto& t : targets[d - 1]) {
      out.push_back(make_step(step_op::inc, t));
      out.push_back(make_step(step_op::dec, t));
    }
    pairs_up_to(progs, d - 1, [&](const program& a, int i) {
      pairs_up_to(progs, d - 1, [&](const program& b, int j) {
        if (exact(i, j, d)) out.push_back(make_seq(a, b));
      });
    });
    pairs_up_to(exprs, d - 1, [&](const expr& e, int i) {
      pairs_up_to(progs, d - 1, [&](const program& a, int j) {
        pairs_up_to(progs, d - 1, [&](const program& b, int k) {
          if (std::max({i, j, k}) == d - 1) out.push_back(make_ite(e, a, b));
        });
      });
    });
    for (const auto& p : progs[d - 1]) out.push_back(make_place(label(u.placement_label), p));
  }

  std::vector<program> all;
  for (auto& bucket : progs) {
    for (auto& p : bucket) all.push_back(std::move(p));
  }
  return all;
}

}  // namespace phd::oracle
