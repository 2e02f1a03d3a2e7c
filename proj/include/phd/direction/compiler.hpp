#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "phd/casp/machine.hpp"
#include "phd/direction/command.hpp"
#include "phd/host/analysis.hpp"

namespace phd::direction {

enum class premise {
  unknown_variable,
  unknown_target,
  invalid_position,
  missing_capability,
  fact_exists,
  budget,
  label_exists,
  position_not_extend,
  state_exists,
  not_prepared,
  not_allowed,
};

std::string_view to_string(premise p);

class direction_error : public std::runtime_error {
 public:
  direction_error(premise which, const std::string& what)
      : std::runtime_error(what), which_(which) {}
  premise which() const noexcept { return which_; }

 private:
  premise which_;
};

// Compile-time allocations that bound every budget.
struct limits {
  std::uint64_t trace_cap = 4096;
  std::uint64_t count_cap = 1000000;
};

inline const std::string tag_breakpoint = "<<bp>>";
inline const std::string tag_trace = "<<t>>";
inline const std::string tag_watch = "<<w>>";
inline const std::string tag_count = "<<c>>";

struct director_fact {
  std::string tag;
  std::string subject;
  bool bit = true;
  auto operator<=>(const director_fact&) const = default;
};

// At most one bit per (tag, subject).
class fact_ledger {
 public:
  std::optional<bool> bit(const std::string& tag, const std::string& subject) const;
  void set(const director_fact& f);
  std::vector<director_fact> facts() const;
  bool any_active() const;
  bool operator==(const fact_ledger&) const = default;

 private:
  std::map<std::pair<std::string, std::string>, bool> bits_;
};

struct controller_delta {
  std::map<std::string, std::int64_t> counters;
  std::map<std::string, std::size_t> arrays;
  std::map<label, casp::program> procedures;
  bool operator==(const controller_delta&) const = default;
};

enum class reply_check { any, label_code, zero };

// One EXEC/REPLY round trip of a director script.
struct exchange {
  casp::program program;
  reply_check check = reply_check::any;
  std::optional<label> expected_label;
  // After the reply N arrives, read `array[0..N-1]` one query at a time.
  std::optional<std::string> dump_array;
  bool operator==(const exchange&) const = default;
};

struct directability_delta {
  std::map<label, host::position> program_edit;
  controller_delta controller;
  std::optional<director_fact> fact;
  // True when applying the delta requires the fact to be new.
  bool establishes = false;
  std::vector<exchange> script;

  bool needs_interactive() const;
  bool operator==(const directability_delta&) const = default;
};

// What compilation may consult: the label-extended program and the ledger.
struct compile_context {
  const host::program& program;
  const fact_ledger& facts;
  limits caps;
  bool strict = false;
};

casp::program compile_condition(const condition& when, casp::program then);

// Procedure bodies, exposed for tests.
casp::program trace_body(const std::string& var, std::uint64_t budget);
casp::program count_body(const std::string& counter, const std::string& overflow,
                         std::uint64_t budget);

// Derived names.
std::string trace_index_name(const std::string& var);     // X_i
std::string trace_overflow_name(const std::string& var);  // X_of
std::string trace_array_name(const std::string& var);     // X_a
std::string count_counter_name(count_kind kind, const std::string& target);
std::string count_overflow_name(count_kind kind, const std::string& target);
std::string count_subject(count_kind kind, const std::string& target);
std::string breakpoint_label(const host::program& p, const host::position& extend_at);

// Extension point a breakpoint at `where` uses: the statement itself if it is
// an extension point, otherwise the extension point just before it.
host::position breakpoint_extend(const host::program& p, const std::string& where);

directability_delta compile_break(const compile_context& cx, const break_cmd& c);
directability_delta compile_unset(const compile_context& cx, const command& c);
directability_delta compile_print(const compile_context& cx, const print_cmd& c);
directability_delta compile_trace_start(const compile_context& cx, const trace_start_cmd& c);
directability_delta compile_trace_ctl(const compile_context& cx, const trace_ctl_cmd& c);
directability_delta compile_watch(const compile_context& cx, const watch_cmd& c);
directability_delta compile_count_start(const compile_context& cx, const count_start_cmd& c);
directability_delta compile_count_ctl(const compile_context& cx, const count_ctl_cmd& c);
directability_delta compile_exec(const exec_cmd& c);
directability_delta compile_resume();

// Dispatches on the command kind.
directability_delta compile(const compile_context& cx, const command& c);

// Host globals as counters initialised to 0.
casp::machine_state initial_state(const host::program& p);

struct directable {
  host::program program;
  casp::machine_state state;
  fact_ledger facts;
  bool operator==(const directable&) const = default;
};

// Extends (p, S, D) by the delta after checking its premises.
directable apply_delta(const directable& x, const directability_delta& d);

bool check_disjoint(const directability_delta& a, const directability_delta& b);

// Session label used as the context of EXECs outside any extension point, and
// the label reported when the program pauses before starting and at exit.
inline const label session_label{"_session"};
inline const label exit_label{"_exit"};

// Program labels in document order, then the session and exit labels.
casp::label_codec make_codec(const host::program& image);

// The program and controller image both sides derive from a source program
// and a list of establishing commands. Labels and state are baked in; stored
// procedures start as `continue` and the ledger starts empty.
struct preparation {
  host::program source;
  host::program image;
  casp::machine_state state;
  casp::label_codec codec;
  std::vector<command> prepared;
  limits caps;
};

preparation prepare(const host::program& source, std::span<const command> commands,
                    const limits& caps);

// Checks that an establishing delta only refers to labels and state present
// in the preparation (throws not_prepared otherwise).
void check_prepared(const preparation& prep, const directability_delta& d);

}  // namespace phd::direction
