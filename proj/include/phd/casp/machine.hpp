#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "phd/casp/ast.hpp"

namespace phd::casp {

// Total injective map from registered labels to positive codes, assigned
// sequentially from 1 in registration order. 0 means "no label".
class label_codec {
 public:
  // Returns the existing code when the label is already registered.
  std::int64_t add(const label& l);
  std::int64_t code(const label& l) const;
  const label& name(std::int64_t code) const;
  bool contains(const label& l) const { return codes_.count(l) > 0; }
  std::size_t size() const { return order_.size(); }
  const std::vector<label>& labels() const { return order_; }

 private:
  std::map<label, std::int64_t> codes_;
  std::vector<label> order_;
};

enum class mode { batch, interactive };

// S = (C, A, SP). Counter and array names share no identifiers.
struct machine_state {
  std::map<std::string, std::int64_t> counters;
  std::map<std::string, std::vector<std::int64_t>> arrays;
  std::map<label, program> procedures;

  bool operator==(const machine_state&) const = default;

  bool has_name(const std::string& name) const {
    return counters.count(name) > 0 || arrays.count(name) > 0;
  }
  void add_counter(const std::string& name, std::int64_t initial);
  void add_array(const std::string& name, std::size_t capacity);
};

struct eval_result {
  machine_state state;
  mode next_mode;
  std::int64_t value;
};

// Big-step evaluation `context |- (S, ia, P) => (S', ia', N)`. On error the
// input state is untouched and casp_error carries the wire error code.
eval_result eval(const label& context, const machine_state& state, mode ia, const program& p,
                 const label_codec& codec);

// Same rules, mutating `state` and `ia` in place. On error they may be
// partially updated.
std::int64_t eval_in_place(const label& context, machine_state& state, mode& ia,
                           const program& p, const label_codec& codec);

std::int64_t wrapping_neg(std::int64_t v);

}  // namespace phd::casp
