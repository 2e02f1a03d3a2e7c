// Interactive director: reads commands from stdin, optionally serves the
// browser bridge.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <iostream>
#include <thread>

#include "phd/director/bridge.hpp"
#include "phd/director/parse.hpp"
#include "phd/director/repl.hpp"
#include "phd/host/parser.hpp"

using namespace phd;
using namespace std::chrono_literals;

int main(int argc, char** argv) {
  CLI::App app{"Direct a program running under phd-run."};
  std::string connect_to;
  std::string program_path;
  std::string transport = "tcp";
  std::string predirect;
  std::string bridge_at;
  std::string log_level = "warn";
  double reply_timeout = 10;
  direction::limits caps;
  director::session_options options;

  app.add_option("--connect", connect_to, "controller address host:port")->required();
  app.add_option("--program", program_path, "the program phd-run was started with")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--predirect", predirect, "the predirect file phd-run was started with")
      ->check(CLI::ExistingFile);
  app.add_option("--transport", transport, "tcp or udp")->check(CLI::IsMember({"tcp", "udp"}));
  app.add_option("--bridge", bridge_at, "serve the HTTP bridge on host:port");
  app.add_option("--trace-cap", caps.trace_cap, "must match phd-run")->check(CLI::PositiveNumber);
  app.add_option("--count-cap", caps.count_cap, "must match phd-run")->check(CLI::PositiveNumber);
  app.add_flag("--strict-directability", options.strict,
               "print needs an active fact; every command runs at a pause");
  app.add_option("--timeout", reply_timeout, "seconds to wait for each reply")->check(CLI::PositiveNumber);
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");
  CLI11_PARSE(app, argc, argv);

  spdlog::set_default_logger(spdlog::stderr_color_mt("phd-direct"));
  spdlog::set_level(spdlog::level::from_str(log_level));
  options.reply_timeout = std::chrono::milliseconds(static_cast<long>(reply_timeout * 1000));

  try {
    auto source = host::load_program_file(program_path);
    std::vector<direction::command> commands;
    if (!predirect.empty()) commands = director::load_script(predirect);
    auto prep = direction::prepare(source, commands, caps);
    auto kind = transport == "udp" ? wire::transport::datagram : wire::transport::stream;
    auto link = wire::connect(wire::parse_endpoint(connect_to), kind);
    director::session session(std::move(prep), std::move(link), options);
    director::repl console(session, std::cout, ::isatty(STDIN_FILENO));
    // A datagram controller only learns of us from our first packet.
    if (kind == wire::transport::datagram) session.exchange(casp::make_value(std::int64_t{0}));
    std::unique_ptr<director::bridge> web;
    if (!bridge_at.empty()) {
      auto at = wire::parse_endpoint(bridge_at);
      web = std::make_unique<director::bridge>(session);
      auto port = web->start(at.host, at.port);
      std::cout << "bridge on http://" << at.host << ":" << port << std::endl;
    }
    console.run(std::cin);
    // With a bridge the session stays up until the controller goes away.
    while (web && session.connected()) std::this_thread::sleep_for(200ms);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "phd-direct: " << e.what() << std::endl;
    return 70;
  }
}
