#include "phd/casp/machine.hpp"

namespace phd::casp {

std::int64_t label_codec::add(const label& l) {
  auto [it, inserted] = codes_.emplace(l, static_cast<std::int64_t>(order_.size()) + 1);
  if (inserted) {
    order_.push_back(l);
  }
  return it->second;
}

std::int64_t label_codec::code(const label& l) const {
  auto it = codes_.find(l);
  if (it == codes_.end()) {
    throw casp_error(error_code::unknown_label, "label '" + l.name + "' is not registered");
  }
  return it->second;
}

const label& label_codec::name(std::int64_t code) const {
  if (code < 1 || static_cast<std::size_t>(code) > order_.size()) {
    throw casp_error(error_code::unknown_label, "no label has code " + std::to_string(code));
  }
  return order_[static_cast<std::size_t>(code - 1)];
}

void machine_state::add_counter(const std::string& name, std::int64_t initial) {
  if (arrays.count(name)) {
    throw casp_error(error_code::unknown_identifier, "'" + name + "' already names an array");
  }
  counters[name] = initial;
}

void machine_state::add_array(const std::string& name, std::size_t capacity) {
  if (counters.count(name)) {
    throw casp_error(error_code::unknown_identifier, "'" + name + "' already names a counter");
  }
  arrays[name] = std::vector<std::int64_t>(capacity, 0);
}

std::int64_t wrapping_neg(std::int64_t v) {
  return static_cast<std::int64_t>(0 - static_cast<std::uint64_t>(v));
}

namespace {

class machine {
 public:
  machine(const label& context, machine_state& s, const label_codec& codec)
      : context_(context), s_(s), codec_(codec) {}

  std::int64_t run(mode& ia, const program& p) {
    return std::visit([&](const auto& x) { return step(ia, x); }, p.node);
  }

 private:
  std::int64_t& counter(const std::string& name) {
    auto it = s_.counters.find(name);
    if (it == s_.counters.end()) {
      throw casp_error(error_code::unknown_identifier, "unknown counter '" + name + "'");
    }
    return it->second;
  }

  std::int64_t index_value(const index& i) {
    if (const auto* n = std::get_if<std::int64_t>(&i)) {
      return *n;
    }
    return counter(std::get<counter_ref>(i).name);
  }

  std::int64_t& cell(const cell_ref& c) {
    auto it = s_.arrays.find(c.array);
    if (it == s_.arrays.end()) {
      throw casp_error(error_code::unknown_identifier, "unknown array '" + c.array + "'");
    }
    auto at = index_value(c.at);
    if (at < 0 || static_cast<std::uint64_t>(at) >= it->second.size()) {
      throw casp_error(error_code::array_bounds,
                       c.array + "[" + std::to_string(at) + "] is outside capacity " +
                           std::to_string(it->second.size()));
    }
    return it->second[static_cast<std::size_t>(at)];
  }

  std::int64_t& slot(const updatable& u) {
    if (const auto* c = std::get_if<counter_ref>(&u)) {
      return counter(c->name);
    }
    return cell(std::get<cell_ref>(u));
  }

  std::int64_t read(const value& v) {
    if (const auto* n = std::get_if<std::int64_t>(&v)) {
      return *n;
    }
    if (const auto* c = std::get_if<counter_ref>(&v)) {
      return counter(c->name);
    }
    return cell(std::get<cell_ref>(v));
  }

  std::int64_t value_of(const expr& e) {
    if (const auto* p = std::get_if<plain_expr>(&e)) {
      return read(p->v);
    }
    if (const auto* n = std::get_if<negate_expr>(&e)) {
      return wrapping_neg(read(n->v));
    }
    const auto& c = std::get<compare_expr>(e);
    auto lhs = read(c.lhs);
    auto rhs = read(c.rhs);
    bool holds = c.op == compare_op::eq ? lhs == rhs : lhs < rhs;
    return holds ? 1 : -1;
  }

  std::int64_t step(mode&, const expr_prog& x) { return value_of(x.e); }

  std::int64_t step(mode&, const assign_prog& x) {
    auto n = value_of(x.e);
    slot(x.target) = n;
    return n;
  }

  std::int64_t step(mode&, const step_prog& x) {
    auto& target = slot(x.target);
    auto delta = static_cast<std::uint64_t>(x.op == step_op::inc ? 1 : -1);
    target = static_cast<std::int64_t>(static_cast<std::uint64_t>(target) + delta);
    return target;
  }

  std::int64_t step(mode& ia, const seq_prog& x) {
    auto before = ia;
    auto first = run(ia, *x.first);
    if (ia != before) {
      return first;
    }
    return run(ia, *x.second);
  }

  std::int64_t step(mode& ia, const ite_prog& x) {
    auto n = value_of(x.condition);
    if (n == 1) {
      return run(ia, *x.then_branch);
    }
    if (n == -1) {
      return run(ia, *x.else_branch);
    }
    throw casp_error(error_code::bad_condition_value,
                     "condition evaluated to " + std::to_string(n) + ", expected 1 or -1");
  }

  std::int64_t step(mode& ia, const break_prog&) {
    auto code = codec_.code(context_);
    ia = mode::interactive;
    return code;
  }

  std::int64_t step(mode& ia, const continue_prog&) {
    auto code = codec_.code(context_);
    ia = mode::batch;
    return code;
  }

  std::int64_t step(mode& ia, const place_prog& x) {
    if (ia != mode::interactive) {
      throw casp_error(error_code::placement_in_batch,
                       "placement at '" + x.at.name + "' is only allowed in interactive mode");
    }
    if (contains_placement(*x.body)) {
      throw casp_error(error_code::nested_placement,
                       "placement at '" + x.at.name + "' contains another placement");
    }
    auto code = codec_.code(x.at);
    s_.procedures.insert_or_assign(x.at, *x.body);
    return code;
  }

  const label& context_;
  machine_state& s_;
  const label_codec& codec_;
};

}  // namespace

std::int64_t eval_in_place(const label& context, machine_state& state, mode& ia,
                           const program& p, const label_codec& codec) {
  return machine(context, state, codec).run(ia, p);
}

eval_result eval(const label& context, const machine_state& state, mode ia, const program& p,
                 const label_codec& codec) {
  eval_result out{state, ia, 0};
  out.value = eval_in_place(context, out.state, out.next_mode, p, codec);
  return out;
}

}  // namespace phd::casp
