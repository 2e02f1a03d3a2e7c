#pragma once

#include <condition_variable>
#include <istream>
#include <mutex>
#include <ostream>

#include "phd/director/session.hpp"

namespace phd::director {

// Line-oriented console over a session. Besides direction commands it knows
//   help | facts | wait [seconds] | quit
// Events are printed as they arrive. Returns when input ends, on quit, or
// once the controller is gone and no more input is pending.
class repl {
 public:
  repl(session& s, std::ostream& out, bool prompt = false);
  ~repl();
  repl(const repl&) = delete;
  repl& operator=(const repl&) = delete;
  void run(std::istream& in);
  // Runs one line; returns false on quit.
  bool execute(const std::string& line);

 private:
  void print(const std::string& text);
  bool wait_for_break(std::chrono::milliseconds limit);

  session& session_;
  std::ostream& out_;
  bool prompt_;
  std::mutex out_mu_;
  std::mutex wait_mu_;
  std::condition_variable wait_cv_;
  std::size_t breaks_ = 0;
  bool gone_ = false;
  std::size_t listener_ = 0;
};

}  // namespace phd::director
