#include "generators.hpp"

namespace phd::oracle {

namespace {

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& items) {
  std::uniform_int_distribution<std::size_t> d(0, items.size() - 1);
  return items[d(rng)];
}

bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

class host_builder {
 public:
  host_builder(std::mt19937_64& rng, const host_gen_options& opts) : rng_(rng), opts_(opts) {}

  host::program build() {
    host::program p;
    for (std::size_t i = 0; i < opts_.globals; ++i) {
      p.globals.push_back("g" + std::to_string(i));
    }
    for (std::size_t i = 0; i < opts_.functions; ++i) {
      host::function_decl f;
      f.name = i + 1 == opts_.functions ? "main" : "f" + std::to_string(i);
      std::size_t arity = i + 1 == opts_.functions ? 0 : std::uniform_int_distribution<std::size_t>(0, 2)(rng_);
      for (std::size_t k = 0; k < arity; ++k) {
        f.params.push_back("p" + std::to_string(k));
      }
      current_ = &f;
      callable_ = std::vector<const host::function_decl*>();
      for (const auto& g : p.functions) {
        callable_.push_back(&g);
      }
      globals_ = p.globals;
      f.body = stmts(0);
      f.result = expression(2);
      p.functions.push_back(std::move(f));
    }
    p.entry = "main";
    return p;
  }

 private:
  std::vector<std::string> names() const {
    std::vector<std::string> out = globals_;
    out.insert(out.end(), current_->params.begin(), current_->params.end());
    return out;
  }

  host::expr expression(int depth) {
    int roll = std::uniform_int_distribution<int>(0, 9)(rng_);
    if (depth <= 0 || roll < 4) {
      auto vars = names();
      if (!vars.empty() && roll % 2 == 0) {
        return host::make_var(pick(rng_, vars));
      }
      static const std::vector<std::int64_t> constants = {
          -3, -1, 0, 1, 2, 5, 7, INT64_MAX, INT64_MIN};
      return host::make_num(pick(rng_, constants));
    }
    if (roll < 6 && !callable_.empty()) {
      const auto* f = pick(rng_, callable_);
      std::vector<host::expr> args;
      for (std::size_t i = 0; i < f->params.size(); ++i) {
        args.push_back(expression(depth - 1));
      }
      return host::make_call(f->name, std::move(args));
    }
    static const std::vector<host::binop> ops = {host::binop::add, host::binop::sub,
                                                 host::binop::eq, host::binop::lt};
    return host::make_binary(pick(rng_, ops), expression(depth - 1), expression(depth - 1));
  }

  std::vector<host::stmt> stmts(std::size_t depth) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(depth ? 1 : 0, opts_.max_stmts)(rng_);
    std::vector<host::stmt> out;
    for (std::size_t i = 0; i < n; ++i) {
      int roll = std::uniform_int_distribution<int>(0, 9)(rng_);
      auto vars = names();
      if (roll < 5 && !vars.empty()) {
        out.push_back(host::make_assign(pick(rng_, vars), expression(2)));
      } else if (roll < 7 && depth < opts_.max_depth) {
        out.push_back(host::make_if(expression(1), stmts(depth + 1)));
      } else if (roll < 9 && opts_.with_labels) {
        std::vector<label> labels;
        if (chance(rng_, 0.5)) {
          labels.emplace_back("U" + std::to_string(next_label_++));
        }
        out.push_back(host::make_extend(std::move(labels)));
      } else {
        out.push_back(host::make_skip());
      }
    }
    return out;
  }

  std::mt19937_64& rng_;
  host_gen_options opts_;
  const host::function_decl* current_ = nullptr;
  std::vector<const host::function_decl*> callable_;
  std::vector<std::string> globals_;
  int next_label_ = 0;
};

class casp_builder {
 public:
  casp_builder(std::mt19937_64& rng, const casp_gen_options& opts) : rng_(rng), opts_(opts) {}

  casp::index index() {
    if (chance(rng_, 0.5)) return pick(rng_, opts_.constants);
    return casp::counter_ref{pick(rng_, opts_.counters)};
  }

  casp::value value() {
    int roll = std::uniform_int_distribution<int>(0, 2)(rng_);
    if (roll == 0) return pick(rng_, opts_.constants);
    if (roll == 1) return casp::counter_ref{pick(rng_, opts_.counters)};
    return casp::cell_ref{pick(rng_, opts_.arrays), index()};
  }

  casp::updatable updatable() {
    if (chance(rng_, 0.5)) return casp::counter_ref{pick(rng_, opts_.counters)};
    return casp::cell_ref{pick(rng_, opts_.arrays), index()};
  }

  casp::expr expression() {
    int roll = std::uniform_int_distribution<int>(0, 3)(rng_);
    if (roll == 0) return casp::negate_expr{value()};
    if (roll == 1) return casp::plain_expr{value()};
    return casp::compare_expr{roll == 2 ? casp::compare_op::eq : casp::compare_op::lt, value(),
                              value()};
  }

  casp::program program(int depth, bool allow_place) {
    int roll = std::uniform_int_distribution<int>(0, depth <= 1 ? 4 : 8)(rng_);
    switch (roll) {
      case 0: return casp::make_expr(expression());
      case 1: return casp::make_assign(updatable(), expression());
      case 2:
        return casp::make_step(chance(rng_, 0.5) ? casp::step_op::inc : casp::step_op::dec,
                               updatable());
      case 3: return casp::make_break();
      case 4: return casp::make_continue();
      case 5:
      case 6:
        return casp::make_seq(program(depth - 1, allow_place), program(depth - 1, allow_place));
      case 7:
        return casp::make_ite(expression(), program(depth - 1, allow_place),
                              program(depth - 1, allow_place));
      default:
        if (!allow_place) return casp::make_continue();
        return casp::make_place(label(pick(rng_, opts_.labels)), program(depth - 1, false));
    }
  }

 private:
  std::mt19937_64& rng_;
  casp_gen_options opts_;
};

}  // namespace

host::program random_host_program(std::mt19937_64& rng, const host_gen_options& opts) {
  return host_builder(rng, opts).build();
}

casp::program random_casp_program(std::mt19937_64& rng, const casp_gen_options& opts) {
  return casp_builder(rng, opts).program(opts.max_depth, true);
}

}  // namespace phd::oracle
