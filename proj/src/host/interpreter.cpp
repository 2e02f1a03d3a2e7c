#include "phd/host/interpreter.hpp"

#include <algorithm>
#include <unordered_map>

namespace phd::host {

std::int64_t wrapping_add(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}

std::int64_t wrapping_sub(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}

store_environment::store_environment(const program& p) {
  for (const auto& g : p.globals) {
    globals_[g] = 0;
  }
}

bool store_environment::has_global(const std::string& name) const {
  return globals_.count(name) > 0;
}

std::int64_t store_environment::load(const std::string& name) { return globals_.at(name); }

void store_environment::store(const std::string& name, std::int64_t value) {
  globals_.at(name) = value;
}

namespace {

struct frame {
  const function_decl* function;
  std::vector<std::int64_t> args;

  std::int64_t* param(const std::string& name) {
    for (std::size_t i = 0; i < function->params.size(); ++i) {
      if (function->params[i] == name) {
        return &args[i];
      }
    }
    return nullptr;
  }
};

class evaluator {
 public:
  evaluator(const program& p, environment& env, run_options options)
      : env_(env), options_(options) {
    for (const auto& f : p.functions) {
      functions_.emplace(f.name, &f);
    }
  }

  std::int64_t call(const std::string& name, std::vector<std::int64_t> args) {
    auto it = functions_.find(name);
    if (it == functions_.end()) {
      throw program_error(fault::unknown_function, "call to undeclared function '" + name + "'");
    }
    const function_decl& f = *it->second;
    if (f.params.size() != args.size()) {
      throw program_error(fault::arity_mismatch,
                          "'" + name + "' expects " + std::to_string(f.params.size()) +
                              " arguments, got " + std::to_string(args.size()));
    }
    if (depth_ >= options_.max_call_depth) {
      throw program_error(fault::call_depth, "call depth limit exceeded in '" + name + "'");
    }
    ++depth_;
    frame fr{&f, std::move(args)};
    exec_list(f.body, fr);
    auto result = eval(f.result, fr);
    --depth_;
    return result;
  }

  // Entry arguments are evaluated left to right with no parameters in scope.
  std::int64_t run_entry(const program& p) {
    function_decl top{"<entry>", {}, {}, make_num(0)};
    frame fr{&top, {}};
    std::vector<std::int64_t> args;
    for (const auto& a : p.entry_args) {
      args.push_back(eval(a, fr));
    }
    return call(p.entry, std::move(args));
  }

 private:
  void exec_list(const std::vector<stmt>& body, frame& fr) {
    for (const auto& s : body) {
      exec(s, fr);
    }
  }

  void exec(const stmt& s, frame& fr) {
    if (const auto* e = std::get_if<extend_stmt>(&s.node)) {
      env_.extend(e->labels);
      return;
    }
    env_.before_statement(s);
    if (const auto* a = std::get_if<assign_stmt>(&s.node)) {
      auto value = eval(a->value, fr);
      if (auto* slot = fr.param(a->target)) {
        *slot = value;
      } else if (env_.has_global(a->target)) {
        env_.store(a->target, value);
      } else {
        throw program_error(fault::unknown_variable,
                            "assignment to undeclared variable '" + a->target + "'");
      }
    } else if (const auto* i = std::get_if<if_stmt>(&s.node)) {
      if (eval(i->condition, fr) > 0) {
        exec_list(i->body, fr);
      }
    }
  }

  std::int64_t eval(const expr& e, frame& fr) {
    return std::visit(
        [&](const auto& n) -> std::int64_t {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, numeral>) {
            return n.value;
          } else if constexpr (std::is_same_v<T, var_ref>) {
            if (auto* slot = fr.param(n.name)) {
              return *slot;
            }
            if (!env_.has_global(n.name)) {
              throw program_error(fault::unknown_variable, "undeclared variable '" + n.name + "'");
            }
            return env_.load(n.name);
          } else if constexpr (std::is_same_v<T, call_expr>) {
            std::vector<std::int64_t> args;
            args.reserve(n.args.size());
            for (const auto& a : n.args) {
              args.push_back(eval(a, fr));
            }
            return call(n.function, std::move(args));
          } else {
            auto lhs = eval(*n.lhs, fr);
            auto rhs = eval(*n.rhs, fr);
            switch (n.op) {
              case binop::add: return wrapping_add(lhs, rhs);
              case binop::sub: return wrapping_sub(lhs, rhs);
              case binop::eq: return lhs == rhs ? 1 : 0;
              case binop::lt: return lhs < rhs ? 1 : 0;
            }
            return 0;
          }
        },
        e.node);
  }

  environment& env_;
  run_options options_;
  std::unordered_map<std::string, const function_decl*> functions_;
  std::size_t depth_ = 0;
};

}  // namespace

std::int64_t run(const program& p, environment& env, run_options options) {
  evaluator ev(p, env, options);
  return ev.run_entry(p);
}

}  // namespace phd::host
