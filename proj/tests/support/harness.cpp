#include "harness.hpp"

#include <spdlog/spdlog.h>

#include <stdexcept>

#include "phd/director/parse.hpp"
#include "phd/host/parser.hpp"

namespace phd::oracle {

namespace {
// Controller and director chatter drowns test output.
const bool quiet = [] {
  spdlog::set_level(getenv("PHD_TEST_LOG") ? spdlog::level::debug : spdlog::level::err);
  return true;
}();
}  // namespace

directed_run::directed_run(const std::string& source, const harness_options& opts) {
  std::vector<direction::command> commands;
  for (const auto& line : opts.predirect) commands.push_back(director::parse_direction(line));
  prep_ = direction::prepare(host::parse_program(source), commands, opts.caps);
  auto [a, b] = wire::memory_link_pair();
  controller_end_ = std::move(a);
  runtime::runtime_config config;
  config.wait_director = opts.wait_director;
  controller_ = std::make_unique<runtime::controller>(prep_, controller_end_.get(), config);
  director::session_options so;
  so.strict = opts.strict;
  so.reply_timeout = opts.reply_timeout;
  director_ = std::make_unique<director::session>(prep_, std::move(b), so);
  thread_ = std::thread([this] {
    try {
      result_ = controller_->run();
    } catch (...) {
      failure_ = std::current_exception();
    }
    controller_end_->close();
    done_ = true;
  });
}

directed_run::~directed_run() {
  director_.reset();
  if (thread_.joinable()) thread_.join();
}

director::event directed_run::expect_break(std::chrono::milliseconds timeout) {
  auto deadline = std::chrono::steady_clock::now() + timeout;
  while (true) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw std::runtime_error("no break event within timeout");
    auto e = director_->next_event(left);
    if (!e) continue;
    seen_.push_back(*e);
    if (e->what == director::event::kind::break_hit) return *e;
    if (e->what == director::event::kind::disconnected) {
      throw std::runtime_error("controller went away while waiting for a break");
    }
  }
}

director::issue_result directed_run::issue(const std::string& line) {
  return director_->issue(director::parse_direction(line));
}

std::int64_t directed_run::finish() {
  while (!done_) {
    if (director_->paused()) {
      try {
        director_->issue(direction::resume_cmd{});
      } catch (const director::director_error&) {
      }
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  thread_.join();
  if (failure_) std::rethrow_exception(failure_);
  return result_;
}

}  // namespace phd::oracle
