#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <set>
#include <span>

#include "phd/casp/machine.hpp"
#include "phd/direction/compiler.hpp"
#include "phd/host/interpreter.hpp"
#include "phd/wire/transport.hpp"

namespace phd::runtime {

struct runtime_config {
  // Pause before the first statement until a director attaches, and again
  // when the program finishes.
  bool wait_director = false;
  std::chrono::milliseconds wait_timeout = std::chrono::hours(24);
  // Refuse every batch-mode EXEC except `break`: direction only at a pause.
  bool strict = false;
  host::run_options run;
};

// Counters for tests and logs.
struct activity {
  std::uint64_t statements = 0;
  std::uint64_t statements_while_interactive = 0;
  std::uint64_t extension_points = 0;
  std::uint64_t execs = 0;
  std::uint64_t errors_sent = 0;
  std::uint64_t break_events = 0;
  std::uint64_t fail_open = 0;
};

inline constexpr std::uint32_t first_event_seq = 0x80000000u;

// The in-program agent: owns the machine state (host globals live in its
// counters), runs stored procedures at extension points, and services
// direction packets. Everything runs on the interpreter thread; the link's
// receiver thread only fills its inbox.
class controller : public host::environment {
 public:
  // `link` may be null: the program then runs with inert direction.
  controller(const direction::preparation& prep, wire::link* link, runtime_config config = {});

  // Runs the entry call. Throws host::program_error on host faults.
  std::int64_t run();

  bool has_global(const std::string& name) const override;
  std::int64_t load(const std::string& name) override;
  void store(const std::string& name, std::int64_t value) override;
  void extend(std::span<const label> labels) override;
  void before_statement(const host::stmt&) override;

  // Drains queued EXECs, runs SP[L] for each label in order, and enters an
  // interactive round if any of them ended in break.
  void on_extension_point(std::span<const label> labels);

  // Serves EXECs until one ends in continue or the director goes away.
  void interactive_round(const label& context);

  // Evaluates one EXEC under the current mode and returns the reply.
  wire::packet process_exec(const wire::packet& exec, const label& context);

  const casp::machine_state& state() const { return state_; }
  const casp::label_codec& codec() const { return codec_; }
  casp::mode mode() const { return mode_; }
  const activity& stats() const { return stats_; }

 private:
  void drain(const label& context);
  void handle(const wire::delivery& d, const label& context);
  void send(const wire::packet& p);
  bool director_present() const;
  void pause(const label& at);

  const direction::preparation& prep_;
  wire::link* link_;
  runtime_config config_;
  casp::machine_state state_;
  casp::label_codec codec_;
  std::set<std::string> globals_;
  casp::mode mode_ = casp::mode::batch;
  std::uint32_t event_seq_ = first_event_seq;
  activity stats_;
};

// Listens on `at`, runs the prepared program under a controller, and returns
// the program's result.
std::int64_t serve(const direction::preparation& prep, const wire::endpoint& at,
                   wire::transport kind, runtime_config config = {});

}  // namespace phd::runtime
