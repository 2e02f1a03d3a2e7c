#include "phd/director/repl.hpp"

#include <sstream>

#include "phd/director/parse.hpp"

namespace phd::director {

repl::repl(session& s, std::ostream& out, bool prompt) : session_(s), out_(out), prompt_(prompt) {
  listener_ = session_.subscribe([this](const event& e) {
    // Fact changes are already echoed by the command that made them.
    if (e.what != event::kind::fact_changed) print(describe(e));
    std::lock_guard lock(wait_mu_);
    if (e.what == event::kind::break_hit) ++breaks_;
    if (e.what == event::kind::disconnected) gone_ = true;
    wait_cv_.notify_all();
  });
}

repl::~repl() { session_.unsubscribe(listener_); }

void repl::print(const std::string& text) {
  std::lock_guard lock(out_mu_);
  out_ << text << std::endl;
}

bool repl::wait_for_break(std::chrono::milliseconds limit) {
  std::unique_lock lock(wait_mu_);
  auto before = breaks_;
  if (session_.paused()) return true;
  return wait_cv_.wait_for(lock, limit, [&] { return breaks_ != before || gone_; }) && !gone_;
}

bool repl::execute(const std::string& raw) {
  std::istringstream words(raw);
  std::string verb;
  words >> verb;
  if (verb.empty() || verb[0] == '#') return true;
  if (verb == "quit" || verb == "exit") return false;
  if (verb == "help") {
    print(std::string(usage()) + "\n  facts | wait [seconds] | quit");
    return true;
  }
  if (verb == "facts") {
    auto facts = session_.facts().facts();
    if (facts.empty()) print("no facts");
    for (const auto& f : facts) print(f.tag + " " + f.subject + " " + (f.bit ? "1" : "0"));
    return true;
  }
  if (verb == "wait") {
    double seconds = 3600;
    words >> seconds;
    if (!wait_for_break(std::chrono::milliseconds(static_cast<long>(seconds * 1000)))) {
      print(session_.connected() ? "no break yet" : "controller disconnected");
    }
    return true;
  }
  try {
    auto r = session_.issue(parse_direction(raw));
    for (const auto& l : r.lines) print(l);
  } catch (const usage_error& e) {
    std::string what = e.what();
    print("error: " + what.substr(0, what.find('\n')) + " (try help)");
  } catch (const direction::direction_error& e) {
    print("error: " + std::string(direction::to_string(e.which())) + ": " + e.what());
  } catch (const director_error& e) {
    print(std::string("error: ") + e.what());
  }
  return true;
}

void repl::run(std::istream& in) {
  std::string line;
  while (true) {
    if (prompt_) {
      std::lock_guard lock(out_mu_);
      out_ << "phd> " << std::flush;
    }
    if (!std::getline(in, line)) break;
    if (!execute(line)) break;
  }
}

}  // namespace phd::director
