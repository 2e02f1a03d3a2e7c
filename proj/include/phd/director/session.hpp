#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "phd/direction/compiler.hpp"
#include "phd/wire/transport.hpp"

namespace phd::director {

class director_error : public std::runtime_error {
 public:
  enum class kind { controller, protocol, timeout, disconnected, not_paused };
  director_error(kind k, const std::string& what, std::optional<error_code> code = std::nullopt)
      : std::runtime_error(what), kind_(k), code_(code) {}
  kind which() const noexcept { return kind_; }
  std::optional<error_code> code() const noexcept { return code_; }

 private:
  kind kind_;
  std::optional<error_code> code_;
};

struct event {
  enum class kind { break_hit, fact_changed, controller_error, disconnected } what = kind::break_hit;
  std::int64_t code = 0;       // label code for break_hit
  std::string label;           // resolved label name, if known
  direction::director_fact fact;
  std::optional<error_code> error;

  static event of(kind k) {
    event e;
    e.what = k;
    return e;
  }
};

std::string describe(const event& e);

struct issue_result {
  std::vector<std::string> lines;
  std::vector<std::int64_t> values;
  std::size_t packets_sent = 0;
  std::size_t placements_sent = 0;
};

struct session_options {
  // Print needs an active fact, and every script runs while paused.
  bool strict = false;
  std::chrono::milliseconds reply_timeout = std::chrono::seconds(10);
};

// Final modes a controller program can leave the machine in.
std::set<casp::mode> final_modes(const casp::program& p, casp::mode start);

// Director state: the prepared program image, the label codec it shares with
// the controller, the fact ledger, and the connection. Commands are issued one
// at a time; a background thread routes replies to the waiting command and
// everything else to the event queue.
class session {
 public:
  session(direction::preparation prep, std::unique_ptr<wire::link> link, session_options opts = {});
  ~session();
  session(const session&) = delete;
  session& operator=(const session&) = delete;

  issue_result issue(const direction::command& c);

  // One EXEC/REPLY exchange. Throws director_error on ERROR replies, timeouts
  // and disconnects.
  std::int64_t exchange(const casp::program& p);

  std::optional<event> next_event(std::chrono::milliseconds timeout);
  // Called on the receiver thread for every event. Once unsubscribe returns
  // the listener is no longer running and will not be called again.
  std::size_t subscribe(std::function<void(const event&)> listener);
  void unsubscribe(std::size_t id);

  direction::fact_ledger facts() const;
  bool paused() const;
  std::size_t break_events_seen() const;
  bool connected() const;
  std::size_t packets_sent() const;
  std::size_t placements_sent() const;
  const direction::preparation& preparation() const { return prep_; }
  std::string label_name(std::int64_t code) const;

 private:
  void pump();
  void publish(event e);
  std::vector<std::int64_t> run_script(const direction::directability_delta& d, issue_result& out);

  direction::preparation prep_;
  std::unique_ptr<wire::link> link_;
  session_options opts_;

  std::mutex issue_mu_;  // one command at a time

  mutable std::mutex mu_;
  std::condition_variable cv_;
  direction::fact_ledger facts_;
  bool paused_ = false;
  bool lost_ = false;
  std::uint32_t next_seq_ = 1;
  std::optional<std::uint32_t> awaiting_;
  std::optional<wire::packet> reply_;
  std::deque<event> events_;
  std::mutex listeners_mu_;
  std::map<std::size_t, std::function<void(const event&)>> listeners_;
  std::size_t next_listener_ = 0;
  std::size_t packets_sent_ = 0;
  std::size_t break_events_ = 0;
  std::size_t placements_sent_ = 0;

  std::atomic<bool> stopping_{false};
  std::thread pump_;
};

}  // namespace phd::director
