#include "phd/runtime/controller.hpp"

#include <spdlog/spdlog.h>

namespace phd::runtime {

using namespace std::chrono_literals;

controller::controller(const direction::preparation& prep, wire::link* link, runtime_config config)
    : prep_(prep),
      link_(link),
      config_(config),
      state_(prep.state),
      codec_(prep.codec),
      globals_(prep.image.globals.begin(), prep.image.globals.end()) {}

bool controller::has_global(const std::string& name) const { return globals_.count(name) > 0; }

std::int64_t controller::load(const std::string& name) { return state_.counters.at(name); }

void controller::store(const std::string& name, std::int64_t value) {
  state_.counters.at(name) = value;
}

void controller::extend(std::span<const label> labels) { on_extension_point(labels); }

void controller::before_statement(const host::stmt&) {
  ++stats_.statements;
  if (mode_ == casp::mode::interactive) ++stats_.statements_while_interactive;
}

bool controller::director_present() const { return link_ != nullptr && link_->connected(); }

void controller::send(const wire::packet& p) {
  if (link_ == nullptr) return;
  try {
    link_->send(p);
    if (p.kind == wire::packet_kind::error) ++stats_.errors_sent;
  } catch (const wire::link_closed& e) {
    spdlog::warn("could not send {}: {}", wire::to_string(p.kind), e.what());
  }
}

std::int64_t controller::run() {
  if (config_.wait_director && link_ != nullptr) {
    spdlog::info("waiting for a director");
    if (link_->wait_connected(config_.wait_timeout)) {
      pause(direction::session_label);
    } else {
      spdlog::warn("no director attached; running undirected");
    }
  }
  auto result = host::run(prep_.image, *this, config_.run);
  if (config_.wait_director && director_present()) {
    drain(direction::exit_label);
    pause(direction::exit_label);
  }
  return result;
}

void controller::pause(const label& at) {
  if (!director_present()) {
    ++stats_.fail_open;
    spdlog::warn("break at {} with no director attached; resuming", at.name);
    return;
  }
  send(wire::make_break_event(event_seq_++, codec_.code(at)));
  ++stats_.break_events;
  interactive_round(at);
}

void controller::on_extension_point(std::span<const label> labels) {
  ++stats_.extension_points;
  const label& context = labels.empty() ? direction::session_label : labels.front();
  drain(context);
  const label* first_break = nullptr;
  for (const auto& l : labels) {
    auto it = state_.procedures.find(l);
    if (it == state_.procedures.end()) continue;
    // Copy: a placement while running could replace the procedure in place.
    auto proc = it->second;
    auto m = casp::mode::batch;
    try {
      casp::eval_in_place(l, state_, m, proc, codec_);
    } catch (const casp::casp_error& e) {
      spdlog::warn("stored procedure at {} failed: {}", l.name, e.what());
      send(wire::make_error(event_seq_++, e.code()));
      continue;
    }
    if (m == casp::mode::interactive && first_break == nullptr) first_break = &l;
  }
  if (first_break != nullptr) pause(*first_break);
}

void controller::drain(const label& context) {
  if (link_ == nullptr) return;
  while (auto d = link_->receive(0ms)) {
    handle(*d, context);
    if (mode_ == casp::mode::interactive) interactive_round(context);
  }
}

void controller::interactive_round(const label& context) {
  mode_ = casp::mode::interactive;
  while (mode_ == casp::mode::interactive) {
    if (!director_present()) {
      ++stats_.fail_open;
      spdlog::warn("director lost while paused at {}; resuming", context.name);
      mode_ = casp::mode::batch;
      return;
    }
    if (auto d = link_->receive(200ms)) handle(*d, context);
  }
}

void controller::handle(const wire::delivery& d, const label& context) {
  if (const auto* bad = std::get_if<wire::bad_frame>(&d)) {
    spdlog::warn("malformed packet (seq {}): {}", bad->seq, wire::to_string(bad->reason));
    send(wire::make_error(bad->seq, error_code::parse_error));
    return;
  }
  const auto& p = std::get<wire::packet>(d);
  if (p.kind != wire::packet_kind::exec) {
    spdlog::warn("ignoring unexpected {} packet", wire::to_string(p.kind));
    return;
  }
  send(process_exec(p, context));
}

wire::packet controller::process_exec(const wire::packet& exec, const label& context) {
  ++stats_.execs;
  casp::program program;
  try {
    program = casp::parse(wire::exec_text(exec));
  } catch (const casp::casp_error& e) {
    return wire::make_error(exec.seq, e.code());
  } catch (const wire::wire_error&) {
    return wire::make_error(exec.seq, error_code::parse_error);
  }
  bool bare_break = std::holds_alternative<casp::break_prog>(program.node);
  if (mode_ == casp::mode::batch &&
      (std::holds_alternative<casp::continue_prog>(program.node) || (config_.strict && !bare_break))) {
    return wire::make_error(exec.seq, error_code::not_interactive);
  }
  try {
    auto r = casp::eval(context, state_, mode_, program, codec_);
    state_ = std::move(r.state);
    mode_ = r.next_mode;
    return wire::make_reply(exec.seq, r.value);
  } catch (const casp::casp_error& e) {
    return wire::make_error(exec.seq, e.code());
  }
}

std::int64_t serve(const direction::preparation& prep, const wire::endpoint& at,
                   wire::transport kind, runtime_config config) {
  auto server = wire::listen(at, kind);
  spdlog::info("controller listening on {}:{}", at.host, server->port());
  controller c(prep, server.get(), config);
  auto result = c.run();
  server->close();
  return result;
}

}  // namespace phd::runtime
