#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "phd/director/session.hpp"

namespace httplib {
class Server;
}

namespace phd::director {

// HTTP front end to a session for the browser console:
//   GET  /facts            the fact ledger
//   GET  /vars?name=X      print X
//   POST /command {line}   any command line
//   GET  /trace?var=X      trace print X
//   GET  /events           server-sent events (breaks, facts, errors)
// Parse and premise failures answer 400, controller failures 502.
class bridge {
 public:
  explicit bridge(session& s);
  ~bridge();
  bridge(const bridge&) = delete;
  bridge& operator=(const bridge&) = delete;

  // Binds (port 0 picks a free one) and serves on a background thread.
  std::uint16_t start(const std::string& host, std::uint16_t port);
  void stop();

 private:
  struct feed {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::string> pending;
    std::uint64_t generation = 0;
  };

  void routes();
  void broadcast(const event& e);

  session& session_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::shared_ptr<feed> feed_;
  std::shared_ptr<bool> alive_;
  std::size_t listener_ = 0;
};

std::string event_json(const event& e);

}  // namespace phd::director
