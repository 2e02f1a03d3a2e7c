#include "phd/director/bridge.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <json.hpp>

#include "phd/director/parse.hpp"

namespace phd::director {

using json = nlohmann::json;
using namespace std::chrono_literals;

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void fail(httplib::Response& res, int status, const std::string& why) {
  reply(res, status, json{{"error", why}});
}

json result_json(const issue_result& r) {
  return json{{"lines", r.lines}, {"values", r.values}, {"packets", r.packets_sent}};
}

// Runs a command line and maps failures onto status codes.
template <typename Render>
void run_line(session& s, const std::string& line, httplib::Response& res, Render render) {
  try {
    reply(res, 200, render(s.issue(parse_direction(line))));
  } catch (const usage_error& e) {
    fail(res, 400, e.what());
  } catch (const direction::direction_error& e) {
    fail(res, 400, std::string(direction::to_string(e.which())) + ": " + e.what());
  } catch (const director_error& e) {
    fail(res, e.which() == director_error::kind::not_paused ? 409 : 502, e.what());
  }
}

}  // namespace

std::string event_json(const event& e) {
  json j;
  switch (e.what) {
    case event::kind::break_hit:
      j = {{"type", "break"}, {"label", e.label}, {"code", e.code}};
      break;
    case event::kind::fact_changed:
      j = {{"type", "fact"}, {"tag", e.fact.tag}, {"subject", e.fact.subject}, {"bit", e.fact.bit ? 1 : 0}};
      break;
    case event::kind::controller_error:
      j = {{"type", "error"}, {"code", e.error ? static_cast<int>(*e.error) : 0}};
      break;
    case event::kind::disconnected: j = {{"type", "disconnected"}}; break;
  }
  j["text"] = describe(e);
  return j.dump();
}

bridge::bridge(session& s)
    : session_(s),
      server_(std::make_unique<httplib::Server>()),
      feed_(std::make_shared<feed>()),
      alive_(std::make_shared<bool>(true)) {
  std::weak_ptr<feed> weak = feed_;
  listener_ = session_.subscribe([weak](const event& e) {
    if (auto f = weak.lock()) {
      std::lock_guard lock(f->mu);
      f->pending.push_back(event_json(e));
      ++f->generation;
      if (f->pending.size() > 1024) f->pending.pop_front();
      f->cv.notify_all();
    }
  });
  routes();
}

bridge::~bridge() {
  session_.unsubscribe(listener_);
  stop();
}

void bridge::routes() {
  auto& svr = *server_;
  svr.Get("/facts", [this](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& f : session_.facts().facts()) {
      out.push_back({{"tag", f.tag}, {"subject", f.subject}, {"bit", f.bit ? 1 : 0}});
    }
    reply(res, 200, out);
  });
  svr.Get("/vars", [this](const httplib::Request& req, httplib::Response& res) {
    auto name = req.get_param_value("name");
    if (name.empty()) return fail(res, 400, "missing ?name=");
    run_line(session_, "print " + name, res, [&](const issue_result& r) {
      return json{{"name", name}, {"value", r.values.empty() ? json(nullptr) : json(r.values.front())}};
    });
  });
  svr.Get("/trace", [this](const httplib::Request& req, httplib::Response& res) {
    auto var = req.get_param_value("var");
    if (var.empty()) return fail(res, 400, "missing ?var=");
    run_line(session_, "trace print " + var, res,
             [&](const issue_result& r) { return json{{"var", var}, {"values", r.values}}; });
  });
  svr.Post("/command", [this](const httplib::Request& req, httplib::Response& res) {
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("line") || !body["line"].is_string()) {
      return fail(res, 400, "expected {\"line\": \"<command>\"}");
    }
    run_line(session_, body["line"].get<std::string>(), res, result_json);
  });
  svr.Get("/events", [this](const httplib::Request&, httplib::Response& res) {
    std::weak_ptr<feed> weak = feed_;
    std::weak_ptr<bool> alive = alive_;
    // Each stream starts at the current end of the feed.
    std::uint64_t seen = 0;
    {
      std::lock_guard lock(feed_->mu);
      seen = feed_->generation;
    }
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "text/event-stream", [weak, alive, seen](std::size_t, httplib::DataSink& sink) mutable {
          auto f = weak.lock();
          if (!f || alive.expired()) return false;
          std::vector<std::string> out;
          {
            std::unique_lock lock(f->mu);
            f->cv.wait_for(lock, 500ms, [&] { return f->generation != seen || alive.expired(); });
            auto fresh = std::min<std::uint64_t>(f->generation - seen, f->pending.size());
            out.assign(f->pending.end() - static_cast<std::ptrdiff_t>(fresh), f->pending.end());
            seen = f->generation;
          }
          if (out.empty()) {
            static const std::string ping = ": ping\n\n";
            return sink.write(ping.data(), ping.size());
          }
          for (const auto& e : out) {
            auto chunk = "data: " + e + "\n\n";
            if (!sink.write(chunk.data(), chunk.size())) return false;
          }
          return true;
        });
  });
}

std::uint16_t bridge::start(const std::string& host, std::uint16_t port) {
  int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound <= 0) throw std::runtime_error("bridge: cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  spdlog::info("bridge listening on http://{}:{}", host, bound);
  return static_cast<std::uint16_t>(bound);
}

void bridge::stop() {
  if (alive_) {
    alive_.reset();
    std::lock_guard lock(feed_->mu);
    feed_->cv.notify_all();
  }
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace phd::director
