// Runs a host program under a controller, optionally reachable by a director.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <algorithm>
#include <iostream>

#include "phd/director/parse.hpp"
#include "phd/host/parser.hpp"
#include "phd/runtime/controller.hpp"

using namespace phd;

int main(int argc, char** argv) {
  CLI::App app{"Run a program with directable extension points."};
  std::string program_path;
  std::string listen_at;
  std::string transport = "tcp";
  std::string predirect;
  std::string log_level = "info";
  direction::limits caps;
  runtime::runtime_config config;

  app.add_option("program", program_path, "host program (.phd)")->required()->check(CLI::ExistingFile);
  app.add_option("--listen", listen_at, "accept a director on host:port or :port");
  app.add_option("--transport", transport, "tcp or udp")->check(CLI::IsMember({"tcp", "udp"}));
  app.add_option("--trace-cap", caps.trace_cap, "largest trace budget")->check(CLI::PositiveNumber);
  app.add_option("--count-cap", caps.count_cap, "largest count budget")->check(CLI::PositiveNumber);
  app.add_option("--predirect", predirect, "commands whose labels and state are baked in at load")
      ->check(CLI::ExistingFile);
  app.add_flag("--wait-director", config.wait_director,
               "pause before the first statement and at exit until a director attaches");
  app.add_flag("--strict-directability", config.strict,
               "accept only `break` while the program runs; everything else at a pause");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");
  CLI11_PARSE(app, argc, argv);

  spdlog::set_default_logger(spdlog::stderr_color_mt("phd-run"));
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    auto source = host::load_program_file(program_path);
    std::vector<direction::command> commands;
    if (!predirect.empty()) commands = director::load_script(predirect);
    auto prep = direction::prepare(source, commands, caps);
    std::int64_t result = 0;
    if (listen_at.empty()) {
      runtime::controller c(prep, nullptr, config);
      result = c.run();
    } else {
      auto kind = transport == "udp" ? wire::transport::datagram : wire::transport::stream;
      result = runtime::serve(prep, wire::parse_endpoint(listen_at), kind, config);
    }
    std::cout << result << std::endl;
    return static_cast<int>(std::clamp<std::int64_t>(result, 0, 255));
  } catch (const std::exception& e) {
    std::cerr << "phd-run: " << e.what() << std::endl;
    return 70;
  }
}
