#include <gtest/gtest.h>

#include <sstream>

#include "harness.hpp"
#include "phd/director/parse.hpp"
#include "phd/director/repl.hpp"
#include "phd/host/parser.hpp"
#include "phd/runtime/controller.hpp"

using namespace phd;
using namespace std::chrono_literals;

namespace {

const char* program =
    "int v\n"
    "int f(int n){ if 0 < n then { v := n; n := f(n - 1) }; return 0 }\n"
    "return f(6)";

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Repl, ScriptedSession) {
  oracle::harness_options opts;
  opts.predirect = {"trace start v max 3"};
  oracle::directed_run run(program, opts);
  std::ostringstream out;
  {
    director::repl console(run.director(), out);
    std::istringstream in(
        "wait 5\n"
        "# comment\n"
        "\n"
        "facts\n"
        "trace start v max 3\n"
        "facts\n"
        "bogus\n"
        "print nope\n"
        "continue\n"
        "wait 5\n"
        "trace print v\n"
        "trace full v\n"
        "print v\n"
        "quit\n"
        "print v\n");
    console.run(in);
  }
  run.finish();
  auto got = lines_of(out.str());
  std::vector<std::string> want = {"break at _session (code 2)",
                                   "no facts",
                                   "fact <<t>> v 1",
                                   "<<t>> v 1"};
  ASSERT_GE(got.size(), 13u) << out.str();
  EXPECT_EQ(std::vector<std::string>(got.begin(), got.begin() + 4), want);
  EXPECT_EQ(got[4].rfind("error: unknown command 'bogus'", 0), 0u) << got[4];
  EXPECT_EQ(got[5].rfind("error: unknown-variable", 0), 0u) << got[5];
  EXPECT_EQ(got[6], "resumed");
  EXPECT_EQ(got[7], "break at v__t0 (code 1)");
  EXPECT_EQ(std::vector<std::string>(got.begin() + 8, got.begin() + 11),
            (std::vector<std::string>{"6", "5", "4"}));
  EXPECT_EQ(got[11], "1");
  EXPECT_EQ(got[12], "v = 3");
  EXPECT_EQ(got.size(), 13u) << out.str();
}

TEST(Script, SkipsCommentsAndNamesBadLines) {
  std::istringstream ok("# baked\n\nwatch v\n  trace start v max 4  \n");
  auto cmds = director::parse_script(ok);
  ASSERT_EQ(cmds.size(), 2u);
  EXPECT_EQ(cmds[1], direction::command(direction::trace_start_cmd{"v", {}, 4}));
  std::istringstream bad("watch v\n\nwatch\n");
  try {
    director::parse_script(bad);
    FAIL();
  } catch (const director::usage_error& e) {
    EXPECT_EQ(std::string(e.what()).rfind("line 3: ", 0), 0u) << e.what();
  }
  EXPECT_THROW(director::load_script("/nonexistent/predirect"), director::usage_error);
}

TEST(Strict, ControllerAcceptsOnlyBreakWhileRunning) {
  auto prep = direction::prepare(
      host::parse_program("int v int main(){ extend{L}; return v }"), {}, {});
  runtime::runtime_config cfg;
  cfg.strict = true;
  runtime::controller c(prep, nullptr, cfg);
  auto at = direction::session_label;
  EXPECT_EQ(wire::error_of(c.process_exec(wire::make_exec(1, "v"), at)), error_code::not_interactive);
  EXPECT_EQ(wire::numeral(c.process_exec(wire::make_exec(2, "break"), at)), prep.codec.code(at));
  EXPECT_EQ(wire::numeral(c.process_exec(wire::make_exec(3, "v"), at)), 0);
}

TEST(Strict, DirectorPausesForEveryScript) {
  oracle::harness_options opts;
  opts.predirect = {"watch v"};
  opts.strict = true;
  opts.wait_director = false;
  oracle::directed_run run(
      "int v int sink\n"
      "int inner(int n){ if 0 < n then { sink := n; sink := inner(n - 1) }; return 0 }\n"
      "int outer(int k){ if 0 < k then { sink := inner(100); sink := outer(k - 1) }; return 0 }\n"
      "return outer(100)",
      opts);
  run.issue("watch v when v = 1");
  auto r = run.issue("print v");
  EXPECT_EQ(r.values, (std::vector<std::int64_t>{0}));
  EXPECT_EQ(r.packets_sent, 3u);  // break, query, continue
}
