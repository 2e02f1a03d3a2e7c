#include <gtest/gtest.h>

#include <random>

#include "casp_enum.hpp"
#include "generators.hpp"
#include "phd/casp/machine.hpp"
#include "printers.hpp"
#include "reference.hpp"

using namespace phd;
using namespace phd::casp;

namespace {

struct fixture_state {
  label_codec codec;
  machine_state state;
  label here{"L"};

  fixture_state() {
    codec.add(label("L"));
    codec.add(label("M"));
    state.add_counter("x", 0);
    state.add_counter("y", 0);
    state.add_array("a", 2);
  }

  eval_result run(std::string_view text, mode m = mode::batch) {
    return eval(here, state, m, parse(text), codec);
  }
};

error_code failure(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const casp_error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected casp_error";
  return error_code::parse_error;
}

std::map<std::string, std::int64_t> codes_of(const label_codec& c) {
  std::map<std::string, std::int64_t> out;
  for (const auto& l : c.labels()) out[l.name] = c.code(l);
  return out;
}

void expect_agrees(const fixture_state& f, const program& p, mode m) {
  auto ref = oracle::reference_eval(f.here.name, f.state, m == mode::interactive, p, codes_of(f.codec));
  try {
    auto got = eval(f.here, f.state, m, p, f.codec);
    ASSERT_TRUE(ref.ok) << serialize(p) << " reference failed with " << ref.error;
    EXPECT_EQ(got.state, ref.state) << serialize(p);
    EXPECT_EQ(got.next_mode == mode::interactive, ref.interactive) << serialize(p);
    EXPECT_EQ(got.value, ref.value) << serialize(p);
  } catch (const casp_error& e) {
    ASSERT_FALSE(ref.ok) << serialize(p) << " library failed with " << e.what();
    EXPECT_EQ(static_cast<int>(e.code()), ref.error) << serialize(p);
  }
}

}  // namespace

TEST(CaspParse, Leaves) {
  EXPECT_EQ(parse("continue"), make_continue());
  EXPECT_EQ(parse("break"), make_break());
  EXPECT_EQ(parse("  x  "), make_value(counter_ref{"x"}));
  EXPECT_EQ(parse("-3"), make_value(std::int64_t{-3}));
  EXPECT_EQ(parse("- x"), make_expr(negate_expr{counter_ref{"x"}}));
}

TEST(CaspParse, NestedPlacementRejected) {
  EXPECT_EQ(failure([] { parse("@L:{ if x = 1 then @M:{break} else continue }"); }),
            error_code::nested_placement);
}

TEST(CaspParse, SyntaxErrors) {
  for (const char* bad : {"", "if x then break", "x :=", "@L:{continue", "inc 3", "3 := x",
                          "a[", "x y", "if x = 1 then break else", "continue;", "@:{break}",
                          "x + y"}) {
    EXPECT_EQ(failure([&] { parse(bad); }), error_code::parse_error) << bad;
  }
}

TEST(CaspParse, DoubleEqualsAccepted) {
  EXPECT_EQ(parse("if v == 5 then break else continue"),
            parse("if v = 5 then break else continue"));
}

TEST(CaspParse, SequenceAndConditionalShape) {
  auto p = parse("if x < 2 then inc x; continue else break; inc y");
  const auto& ite = std::get<ite_prog>(p.node);
  EXPECT_EQ(*ite.then_branch, parse("inc x; continue"));
  EXPECT_EQ(*ite.else_branch, parse("break; inc y"));
}

TEST(CaspSerialize, Canonical) {
  EXPECT_EQ(serialize(make_continue()), "continue");
  EXPECT_EQ(serialize(parse("x:=a[y];inc   a[0]")), "x := a[y]; inc a[0]");
  EXPECT_EQ(serialize(parse("if v == 5 then break else continue")),
            "if v = 5 then break else continue");
  EXPECT_EQ(serialize(parse("@M:{inc x; continue}")), "@M:{inc x; continue}");
}

TEST(CaspSerialize, TraceBodyRoundTrip) {
  const std::string text =
      "if v_i < 500 then v_a[v_i] := v; inc v_i; continue else inc v_of; break";
  auto p = parse(text);
  EXPECT_EQ(serialize(p), text);
  EXPECT_EQ(parse(serialize(p)), p);
  const auto& ite = std::get<ite_prog>(p.node);
  EXPECT_EQ(*ite.then_branch,
            make_seq({make_assign(cell_ref{"v_a", counter_ref{"v_i"}},
                                  plain_expr{counter_ref{"v"}}),
                      make_step(step_op::inc, counter_ref{"v_i"}), make_continue()}));
  EXPECT_EQ(*ite.else_branch,
            make_seq(make_step(step_op::inc, counter_ref{"v_of"}), make_break()));
}

TEST(CaspSerialize, LeftNestedSequencesAndConditionals) {
  auto left = make_seq(make_seq(make_break(), make_continue()), make_continue());
  EXPECT_EQ(parse(serialize(left)), left);
  auto ite_first = make_seq(make_ite(plain_expr{std::int64_t{1}}, make_break(), make_continue()),
                            make_break());
  EXPECT_EQ(parse(serialize(ite_first)), ite_first);
  EXPECT_NE(parse(serialize(ite_first)), parse("if 1 then break else continue; break"));
}

TEST(CaspSerialize, RoundTripRandomAndInjective) {
  std::mt19937_64 rng(41);
  std::map<std::string, program> seen;
  for (int i = 0; i < 5000; ++i) {
    auto p = oracle::random_casp_program(rng);
    auto text = serialize(p);
    ASSERT_EQ(parse(text), p) << text;
    auto [it, inserted] = seen.emplace(text, p);
    if (!inserted) EXPECT_EQ(it->second, p) << text;
  }
}

TEST(CaspSerialize, RoundTripExhaustive) {
  for (const auto& p : oracle::enumerate_casp(3)) {
    if (!placement_free_nesting(p)) continue;
    ASSERT_EQ(parse(serialize(p)), p) << serialize(p);
  }
}

TEST(CaspCodec, SequentialCodes) {
  label_codec c;
  EXPECT_EQ(c.add(label("A")), 1);
  EXPECT_EQ(c.add(label("B")), 2);
  EXPECT_EQ(c.add(label("A")), 1);
  EXPECT_EQ(c.size(), 2u);
  for (const auto& l : c.labels()) EXPECT_EQ(c.name(c.code(l)), l);
  EXPECT_EQ(failure([&] { c.code(label("Z")); }), error_code::unknown_label);
  EXPECT_EQ(failure([&] { c.name(0); }), error_code::unknown_label);
  EXPECT_EQ(failure([&] { c.name(3); }), error_code::unknown_label);
}

TEST(CaspEval, ContinueAndBreak) {
  fixture_state f;
  auto r = f.run("continue");
  EXPECT_EQ(r.state, f.state);
  EXPECT_EQ(r.next_mode, mode::batch);
  EXPECT_EQ(r.value, 1);
  r = f.run("break");
  EXPECT_EQ(r.next_mode, mode::interactive);
  EXPECT_EQ(r.value, 1);
  r = f.run("continue", mode::interactive);
  EXPECT_EQ(r.next_mode, mode::batch);
}

TEST(CaspEval, Comparisons) {
  fixture_state f;
  EXPECT_EQ(f.run("3 < 5").value, 1);
  EXPECT_EQ(f.run("5 < 3").value, -1);
  EXPECT_EQ(f.run("4 = 4").value, 1);
  EXPECT_EQ(f.run("4 = 5").value, -1);
  EXPECT_EQ(f.run("3 < 5").next_mode, mode::batch);
}

TEST(CaspEval, BreakShortCircuitsSequence) {
  fixture_state f;
  auto r = f.run("break; inc x");
  EXPECT_EQ(r.next_mode, mode::interactive);
  EXPECT_EQ(r.state.counters.at("x"), 0);
  EXPECT_EQ(r.value, 1);
  // Without a mode change the second program runs.
  r = f.run("inc x; inc x");
  EXPECT_EQ(r.state.counters.at("x"), 2);
  EXPECT_EQ(r.value, 2);
  // In interactive mode break does not change the mode, so sequencing continues.
  r = f.run("break; inc x", mode::interactive);
  EXPECT_EQ(r.state.counters.at("x"), 1);
}

TEST(CaspEval, PlacementOnlyInteractive) {
  fixture_state f;
  EXPECT_EQ(failure([&] { f.run("@M:{continue}"); }), error_code::placement_in_batch);
  auto r = f.run("@M:{inc x; continue}", mode::interactive);
  EXPECT_EQ(r.value, 2);
  EXPECT_EQ(r.next_mode, mode::interactive);
  EXPECT_EQ(r.state.procedures.at(label("M")), parse("inc x; continue"));
  EXPECT_EQ(failure([&] { f.run("@Q:{continue}", mode::interactive); }), error_code::unknown_label);
  program nested = make_place(label("M"), make_place(label("L"), make_break()));
  EXPECT_EQ(failure([&] { eval(f.here, f.state, mode::interactive, nested, f.codec); }),
            error_code::nested_placement);
}

TEST(CaspEval, ArraysAndCounters) {
  fixture_state f;
  auto r = f.run("a[1] := 7; x := 1; y := a[x]; dec a[x]; - y");
  EXPECT_EQ(r.state.arrays.at("a"), (std::vector<std::int64_t>{0, 6}));
  EXPECT_EQ(r.state.counters.at("y"), 7);
  EXPECT_EQ(r.value, -7);
  EXPECT_EQ(failure([&] { f.run("a[2]"); }), error_code::array_bounds);
  EXPECT_EQ(failure([&] { f.run("a[-1] := 0"); }), error_code::array_bounds);
  EXPECT_EQ(failure([&] { f.run("zz"); }), error_code::unknown_identifier);
  EXPECT_EQ(failure([&] { f.run("b[0]"); }), error_code::unknown_identifier);
  EXPECT_EQ(failure([&] { f.run("inc zz"); }), error_code::unknown_identifier);
}

TEST(CaspEval, ConditionMustBeSign) {
  fixture_state f;
  EXPECT_EQ(f.run("if 1 then inc x else dec x").value, 1);
  EXPECT_EQ(f.run("if -1 then inc x else dec x").value, -1);
  EXPECT_EQ(failure([&] { f.run("if 0 then inc x else dec x"); }),
            error_code::bad_condition_value);
  EXPECT_EQ(failure([&] { f.run("if 2 then inc x else dec x"); }),
            error_code::bad_condition_value);
}

TEST(CaspEval, WrappingNegationAndSteps) {
  fixture_state f;
  f.state.counters["x"] = INT64_MAX;
  EXPECT_EQ(f.run("inc x").value, INT64_MIN);
  f.state.counters["x"] = INT64_MIN;
  EXPECT_EQ(f.run("- x").value, INT64_MIN);
  EXPECT_EQ(f.run("dec x").value, INT64_MAX);
}

TEST(CaspEval, ErrorLeavesInputUntouched) {
  fixture_state f;
  auto before = f.state;
  EXPECT_THROW(f.run("inc x; a[5] := 1"), casp_error);
  EXPECT_EQ(f.state, before);
}

TEST(CaspEval, UnknownContextLabel) {
  fixture_state f;
  f.here = label("Nope");
  EXPECT_EQ(failure([&] { f.run("continue"); }), error_code::unknown_label);
  EXPECT_EQ(f.run("3").value, 3);
}

TEST(CaspEval, MatchesReferenceOnRandomPrograms) {
  std::mt19937_64 rng(43);
  oracle::casp_gen_options opts;
  opts.labels = {"L", "M", "Q"};
  opts.counters = {"x", "y", "z"};
  opts.max_depth = 6;
  for (int i = 0; i < 20000; ++i) {
    fixture_state f;
    std::uniform_int_distribution<std::int64_t> v(-2, 3);
    f.state.counters["x"] = v(rng);
    f.state.counters["y"] = v(rng);
    f.state.arrays["a"] = {v(rng), v(rng)};
    auto p = oracle::random_casp_program(rng, opts);
    expect_agrees(f, p, i % 2 ? mode::interactive : mode::batch);
    if (HasFailure()) return;
  }
}

TEST(CaspEval, TouchesOnlyNamedState) {
  std::mt19937_64 rng(47);
  oracle::casp_gen_options opts;
  opts.labels = {"M"};
  for (int i = 0; i < 2000; ++i) {
    fixture_state f;
    f.state.add_counter("untouched", 99);
    f.state.add_array("spare", 3);
    f.state.procedures.emplace(label("L"), make_break());
    auto p = oracle::random_casp_program(rng, opts);
    try {
      auto r = eval(f.here, f.state, mode::interactive, p, f.codec);
      EXPECT_EQ(r.state.counters.at("untouched"), 99);
      EXPECT_EQ(r.state.arrays.at("spare"), std::vector<std::int64_t>(3, 0));
      EXPECT_EQ(r.state.procedures.at(label("L")), make_break());
      if (!contains_placement(p)) EXPECT_EQ(r.state.procedures, f.state.procedures);
    } catch (const casp_error&) {
    }
  }
}

TEST(CaspEval, ModeChangesOnlyThroughLeaves) {
  std::mt19937_64 rng(53);
  fixture_state f;
  for (int i = 0; i < 5000; ++i) {
    auto p = oracle::random_casp_program(rng);
    for (auto m : {mode::batch, mode::interactive}) {
      try {
        auto r = eval(f.here, f.state, m, p, f.codec);
        if (r.next_mode != m) EXPECT_EQ(r.value, f.codec.code(f.here)) << serialize(p);
        if (std::holds_alternative<break_prog>(p.node) ||
            std::holds_alternative<continue_prog>(p.node)) {
          EXPECT_EQ(r.value, 1);
        }
      } catch (const casp_error&) {
      }
    }
  }
}
