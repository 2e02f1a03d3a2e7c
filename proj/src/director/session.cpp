#include "phd/director/session.hpp"

#include <spdlog/spdlog.h>

namespace phd::director {

using namespace std::chrono_literals;
using direction::reply_check;

namespace {

std::string join(const std::vector<std::int64_t>& xs) {
  std::string out;
  for (auto x : xs) out += (out.empty() ? "" : " ") + std::to_string(x);
  return out;
}

void modes_into(const casp::program& p, casp::mode start, std::set<casp::mode>& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, casp::break_prog>) {
          out.insert(casp::mode::interactive);
        } else if constexpr (std::is_same_v<T, casp::continue_prog>) {
          out.insert(casp::mode::batch);
        } else if constexpr (std::is_same_v<T, casp::seq_prog>) {
          std::set<casp::mode> first;
          modes_into(*x.first, start, first);
          for (auto m : first) {
            if (m != start) out.insert(m);
            else modes_into(*x.second, start, out);
          }
        } else if constexpr (std::is_same_v<T, casp::ite_prog>) {
          modes_into(*x.then_branch, start, out);
          modes_into(*x.else_branch, start, out);
        } else {
          out.insert(start);
        }
      },
      p.node);
}

}  // namespace

std::set<casp::mode> final_modes(const casp::program& p, casp::mode start) {
  std::set<casp::mode> out;
  modes_into(p, start, out);
  return out;
}

std::string describe(const event& e) {
  switch (e.what) {
    case event::kind::break_hit:
      return "break at " + (e.label.empty() ? std::string("?") : e.label) + " (code " +
             std::to_string(e.code) + ")";
    case event::kind::fact_changed:
      return "fact " + e.fact.tag + " " + e.fact.subject + " " + (e.fact.bit ? "1" : "0");
    case event::kind::controller_error:
      return "controller error " + std::to_string(e.error ? static_cast<int>(*e.error) : 0) + " (" +
             std::string(e.error ? to_string(*e.error) : "unknown") + ")";
    case event::kind::disconnected: return "controller disconnected";
  }
  return "event";
}

session::session(direction::preparation prep, std::unique_ptr<wire::link> link, session_options opts)
    : prep_(std::move(prep)), link_(std::move(link)), opts_(opts) {
  pump_ = std::thread([this] { pump(); });
}

session::~session() {
  stopping_ = true;
  if (pump_.joinable()) pump_.join();
  link_->close();
}

std::string session::label_name(std::int64_t code) const {
  try {
    return prep_.codec.name(code).name;
  } catch (const casp::casp_error&) {
    return "";
  }
}

std::size_t session::subscribe(std::function<void(const event&)> listener) {
  std::lock_guard lock(listeners_mu_);
  listeners_.emplace(next_listener_, std::move(listener));
  return next_listener_++;
}

void session::unsubscribe(std::size_t id) {
  std::lock_guard lock(listeners_mu_);
  listeners_.erase(id);
}

void session::publish(event e) {
  {
    std::lock_guard lock(mu_);
    events_.push_back(e);
  }
  cv_.notify_all();
  std::lock_guard lock(listeners_mu_);
  for (const auto& [id, l] : listeners_) l(e);
}

void session::pump() {
  bool announced_loss = false;
  while (!stopping_) {
    auto d = link_->receive(100ms);
    if (!d) {
      if (!link_->connected() && !announced_loss) {
        announced_loss = true;
        {
          std::lock_guard lock(mu_);
          lost_ = true;
          paused_ = false;
        }
        cv_.notify_all();
        publish(event::of(event::kind::disconnected));
      }
      continue;
    }
    if (std::holds_alternative<wire::bad_frame>(*d)) {
      spdlog::warn("malformed packet from controller");
      continue;
    }
    auto p = std::get<wire::packet>(std::move(*d));
    bool is_answer = p.kind == wire::packet_kind::reply || p.kind == wire::packet_kind::error;
    {
      std::lock_guard lock(mu_);
      if (is_answer && awaiting_ && p.seq == *awaiting_) {
        reply_ = std::move(p);
        awaiting_.reset();
        cv_.notify_all();
        continue;
      }
    }
    if (p.kind == wire::packet_kind::break_event) {
      auto code = wire::numeral(p);
      {
        std::lock_guard lock(mu_);
        paused_ = true;
        ++break_events_;
      }
      auto e = event::of(event::kind::break_hit);
      e.code = code;
      e.label = label_name(code);
      publish(e);
    } else if (p.kind == wire::packet_kind::error) {
      auto e = event::of(event::kind::controller_error);
      e.error = wire::error_of(p);
      publish(e);
    } else {
      spdlog::warn("discarding stale {} seq {}", wire::to_string(p.kind), p.seq);
    }
  }
}

std::int64_t session::exchange(const casp::program& program) {
  std::unique_lock lock(mu_);
  if (lost_) throw director_error(director_error::kind::disconnected, "controller disconnected");
  auto seq = next_seq_++;
  awaiting_ = seq;
  reply_.reset();
  try {
    link_->send(wire::make_exec(seq, casp::serialize(program)));
  } catch (const wire::link_closed& e) {
    awaiting_.reset();
    throw director_error(director_error::kind::disconnected, e.what());
  }
  ++packets_sent_;
  if (casp::contains_placement(program)) ++placements_sent_;
  bool answered = cv_.wait_for(lock, opts_.reply_timeout, [&] { return reply_.has_value() || lost_; });
  if (!reply_) {
    awaiting_.reset();
    if (lost_) throw director_error(director_error::kind::disconnected, "controller disconnected");
    (void)answered;
    throw director_error(director_error::kind::timeout,
                         "no reply to '" + casp::serialize(program) + "' within timeout");
  }
  auto reply = std::move(*reply_);
  reply_.reset();
  if (reply.kind == wire::packet_kind::error) {
    auto code = wire::error_of(reply);
    throw director_error(director_error::kind::controller,
                         "controller error " + std::to_string(static_cast<int>(code)) + " (" +
                             std::string(to_string(code)) + ")",
                         code);
  }
  return wire::numeral(reply);
}

std::vector<std::int64_t> session::run_script(const direction::directability_delta& d,
                                              issue_result& out) {
  std::vector<std::int64_t> shown;
  for (const auto& step : d.script) {
    auto before = packets_sent();
    auto n = exchange(step.program);
    switch (step.check) {
      case reply_check::label_code:
        if (n != prep_.codec.code(*step.expected_label)) {
          throw director_error(director_error::kind::protocol,
                               "placement at " + step.expected_label->name + " answered " +
                                   std::to_string(n));
        }
        break;
      case reply_check::zero:
        if (n != 0) {
          throw director_error(director_error::kind::protocol,
                               "expected 0, controller answered " + std::to_string(n));
        }
        break;
      case reply_check::any:
        if (!step.dump_array) shown.push_back(n);
        break;
    }
    if (step.dump_array) {
      for (std::int64_t i = 0; i < n; ++i) {
        shown.push_back(exchange(casp::make_value(casp::cell_ref{*step.dump_array, i})));
      }
    }
    out.packets_sent += packets_sent() - before;
  }
  return shown;
}

issue_result session::issue(const direction::command& c) {
  std::lock_guard serial(issue_mu_);
  issue_result out;
  auto ledger = facts();
  direction::compile_context cx{prep_.image, ledger, prep_.caps, opts_.strict};
  auto d = direction::compile(cx, c);
  if (direction::is_establishing(c)) direction::check_prepared(prep_, d);

  if (d.fact && ledger.bit(d.fact->tag, d.fact->subject) == d.fact->bit) {
    out.lines.push_back(d.fact->bit ? "already active" : "already inactive");
    return out;
  }

  auto placements_before = placements_sent();
  if (std::holds_alternative<direction::resume_cmd>(c)) {
    try {
      exchange(casp::make_continue());
    } catch (const director_error& e) {
      if (e.code() == error_code::not_interactive) {
        throw director_error(director_error::kind::not_paused, "the program is not at a break");
      }
      throw;
    }
    std::lock_guard lock(mu_);
    paused_ = false;
    out.packets_sent = 1;
    out.lines.push_back("resumed");
    return out;
  }

  if (const auto* x = std::get_if<direction::exec_cmd>(&c)) {
    auto start = paused() ? casp::mode::interactive : casp::mode::batch;
    auto n = exchange(x->program);
    auto modes = final_modes(x->program, start);
    if (modes.size() == 1) {
      std::lock_guard lock(mu_);
      paused_ = *modes.begin() == casp::mode::interactive;
    }
    out.packets_sent = 1;
    out.values.push_back(n);
    out.lines.push_back(std::to_string(n));
    return out;
  }

  bool paused_here = false;
  std::size_t breaks_before = 0;
  bool must_pause = d.needs_interactive() || (opts_.strict && !d.script.empty());
  if (must_pause && !paused()) {
    {
      std::lock_guard lock(mu_);
      breaks_before = break_events_;
    }
    exchange(casp::make_break());
    out.packets_sent += 1;
    paused_here = true;
    std::lock_guard lock(mu_);
    paused_ = true;
  }
  try {
    out.values = run_script(d, out);
  } catch (...) {
    if (paused_here && break_events_seen() == breaks_before) {
      try {
        exchange(casp::make_continue());
        std::lock_guard lock(mu_);
        paused_ = false;
      } catch (const director_error&) {
      }
    }
    throw;
  }
  // A breakpoint that fired meanwhile owns the pause; our `break` was a no-op.
  if (paused_here && break_events_seen() != breaks_before) paused_here = false;
  if (paused_here) {
    exchange(casp::make_continue());
    out.packets_sent += 1;
    std::lock_guard lock(mu_);
    paused_ = false;
  }
  out.placements_sent = placements_sent() - placements_before;

  if (d.fact) {
    {
      std::lock_guard lock(mu_);
      facts_.set(*d.fact);
    }
    auto e = event::of(event::kind::fact_changed);
    e.fact = *d.fact;
    publish(e);
    out.lines.push_back(describe(e));
  }
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, direction::print_cmd>) {
          out.lines.push_back(x.var + " = " + join(out.values));
        } else if constexpr (std::is_same_v<T, direction::trace_ctl_cmd> ||
                             std::is_same_v<T, direction::count_ctl_cmd>) {
          if (x.op == direction::ctl_op::clear) out.lines.push_back("cleared");
          for (auto v : out.values) out.lines.push_back(std::to_string(v));
        }
      },
      c);
  return out;
}

std::optional<event> session::next_event(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return !events_.empty(); });
  if (events_.empty()) return std::nullopt;
  auto e = std::move(events_.front());
  events_.pop_front();
  return e;
}

direction::fact_ledger session::facts() const {
  std::lock_guard lock(mu_);
  return facts_;
}

std::size_t session::break_events_seen() const {
  std::lock_guard lock(mu_);
  return break_events_;
}

bool session::paused() const {
  std::lock_guard lock(mu_);
  return paused_;
}

bool session::connected() const {
  std::lock_guard lock(mu_);
  return !lost_;
}

std::size_t session::packets_sent() const {
  std::lock_guard lock(mu_);
  return packets_sent_;
}

std::size_t session::placements_sent() const {
  std::lock_guard lock(mu_);
  return placements_sent_;
}

}  // namespace phd::director
