#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "svas/annotation.hpp"
#include "svas/configuration.hpp"
#include "svas/program.hpp"

using namespace svas;

namespace {

ParseErrorKind parse_error_kind(const std::string& text) {
  try {
    parse_svas(text);
  } catch (const ParseError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected a parse error for:\n" << text;
  return ParseErrorKind::Syntax;
}

}  // namespace

TEST(ParseSvas, MinimalProgram) {
  auto p = parse_svas("counters: x\nalphabet:\nL0: inc x\nhalt");
  ASSERT_EQ(p.commands.size(), 2u);
  EXPECT_EQ(p.commands[0], Command::inc(0));
  EXPECT_EQ(p.commands[1], Command::halt());
  EXPECT_EQ(p.labels.at("L0"), 0u);
  EXPECT_TRUE(p.alphabet.empty());
}

TEST(ParseSvas, AllCommandForms) {
  auto p = parse_svas(
      "# comment line\n"
      "counters: x y\n"
      "alphabet: a b\n"
      "S: push a   # trailing comment\n"
      "pop a\n"
      "dec y\n"
      "goto S or E\n"
      "E: goto E\n"
      "halt\n");
  ASSERT_EQ(p.commands.size(), 6u);
  EXPECT_EQ(p.commands[0], Command::push(0));
  EXPECT_EQ(p.commands[1], Command::pop(0));
  EXPECT_EQ(p.commands[2], Command::dec(1));
  EXPECT_EQ(p.commands[3], Command::jump(0, 4));
  EXPECT_EQ(p.commands[4], Command::jump(4, 4));
}

TEST(ParseSvas, SeveralLabelsOnOneCommand) {
  auto p = parse_svas("counters:\nalphabet:\nA: B: halt\n");
  EXPECT_EQ(p.labels.at("A"), 0u);
  EXPECT_EQ(p.labels.at("B"), 0u);
}

TEST(ParseSvas, Errors) {
  EXPECT_EQ(parse_error_kind("counters: x\nalphabet:\nhalt\ninc x\n"), ParseErrorKind::HaltNotLast);
  EXPECT_EQ(parse_error_kind("counters: x\nalphabet:\ninc x\n"), ParseErrorKind::MissingHalt);
  EXPECT_EQ(parse_error_kind("counters: x\nalphabet:\ngoto Q or Q\nhalt\n"), ParseErrorKind::DanglingLabel);
  EXPECT_EQ(parse_error_kind("counters: x\nalphabet:\ninc z\nhalt\n"), ParseErrorKind::UndeclaredCounter);
  EXPECT_EQ(parse_error_kind("counters: x\nalphabet:\npush a\nhalt\n"), ParseErrorKind::UndeclaredSymbol);
  EXPECT_EQ(parse_error_kind("counters: x\nalphabet:\nL: inc x\nL: halt\n"), ParseErrorKind::DuplicateLabel);
  EXPECT_EQ(parse_error_kind("counters: x x\nalphabet:\nhalt\n"), ParseErrorKind::DuplicateDeclaration);
  EXPECT_EQ(parse_error_kind("counters: x\nalphabet:\nfrobnicate x\nhalt\n"), ParseErrorKind::Syntax);
  EXPECT_EQ(parse_error_kind("counters: x\nalphabet:\ngoto A B\nA: halt\n"), ParseErrorKind::Syntax);
  EXPECT_EQ(parse_error_kind("counters: x\nalphabet:\ninc x\nE:\n"), ParseErrorKind::DanglingLabel);
}

TEST(ParseSvas, ErrorLineNumbers) {
  try {
    parse_svas("counters: x\nalphabet:\ninc x\ninc q\nhalt\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(SerializeSvas, CanonicalForm) {
  SvasProgram p;
  p.counters = {"x"};
  p.commands = {Command::inc(0), Command::halt()};
  EXPECT_EQ(serialize_svas(p), "counters: x\nalphabet:\nC0: inc x\nC1: halt");
}

TEST(SerializeSvas, DeterministicJump) {
  auto p = parse_svas("counters:\nalphabet:\nA: goto B\nB: goto C\nC: goto D\nD: goto D or E\nE: halt\n");
  EXPECT_NE(serialize_svas(p).find("C2: goto C3 or C3"), std::string::npos);
}

TEST(SerializeSvas, ParseOfSerializeIsCanonical) {
  const std::string t = "counters: x y\nalphabet: a\nL: inc x\npush a\npop a\ngoto L or M\nM: dec y\nhalt\n";
  auto p = parse_svas(t);
  auto canon = serialize_svas(p);
  EXPECT_EQ(serialize_svas(parse_svas(canon)), canon);
  EXPECT_EQ(parse_svas(canon), p);
}

TEST(SerializeSvas, RandomRoundTrips) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    auto p = oracle::random_program(rng, 12);
    auto q = parse_svas(serialize_svas(p));
    EXPECT_EQ(q, p);
    EXPECT_TRUE(validate(q).empty());
  }
}

TEST(SerializeSvas, ThousandCommandRoundTrip) {
  std::mt19937_64 rng(1000);
  SvasProgram p;
  p.counters = {"x", "y", "z"};
  p.alphabet = {"a", "b"};
  for (std::uint32_t i = 0; i < 999; ++i) {
    switch (rng() % 5) {
      case 0: p.commands.push_back(Command::inc(rng() % 3)); break;
      case 1: p.commands.push_back(Command::dec(rng() % 3)); break;
      case 2: p.commands.push_back(Command::push(rng() % 2)); break;
      case 3: p.commands.push_back(Command::pop(rng() % 2)); break;
      default: p.commands.push_back(Command::jump(rng() % 1000, rng() % 1000));
    }
  }
  p.commands.push_back(Command::halt());
  ASSERT_EQ(p.commands.size(), 1000u);
  auto q = parse_svas(serialize_svas(p));
  EXPECT_EQ(q, p);
  EXPECT_EQ(q.labels.size(), 1000u);
}

TEST(Validate, Examples) {
  SvasProgram ok;
  ok.counters = {"x"};
  ok.commands = {Command::inc(0), Command::halt()};
  EXPECT_TRUE(validate(ok).empty());

  SvasProgram bad = ok;
  bad.commands = {Command::halt(), Command::inc(0)};
  auto v = validate(bad);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v.front().kind, ViolationKind::HaltNotLast);

  SvasProgram dangling = ok;
  dangling.commands = {Command::jump(7, 0), Command::halt()};
  v = validate(dangling);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v.front().kind, ViolationKind::DanglingLabel);

  SvasProgram undeclared = ok;
  undeclared.commands = {Command::dec(3), Command::push(0), Command::halt()};
  v = validate(undeclared);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].kind, ViolationKind::UndeclaredCounter);
  EXPECT_EQ(v[1].kind, ViolationKind::UndeclaredSymbol);

  SvasProgram empty;
  v = validate(empty);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v.front().kind, ViolationKind::MissingHalt);
}

TEST(Validate, ViolationIndicesStableUnderReparse) {
  SvasProgram p;
  p.counters = {"x"};
  p.commands = {Command::inc(0), Command::jump(0, 1), Command::halt()};
  auto q = parse_svas(serialize_svas(p));
  q.commands[1] = Command::jump(0, 9);
  p.commands[1] = Command::jump(0, 9);
  ASSERT_EQ(validate(p).size(), 1u);
  EXPECT_EQ(validate(p)[0].command, validate(q)[0].command);
}

TEST(Configuration, InitialAndFormatting) {
  auto p = parse_svas("counters: x y\nalphabet: a b\npush b\npush a\ninc y\nhalt\n");
  auto c = Configuration::initial(p);
  EXPECT_EQ(c.pc, 0u);
  EXPECT_TRUE(c.all_counters_zero());
  EXPECT_EQ(format_counters(p, c), "x=0,y=0");
  EXPECT_EQ(format_stack(p, c), "-");
  c.counters[1] = 2;
  c.stack = {1, 0};
  EXPECT_EQ(format_counters(p, c), "x=0,y=2");
  EXPECT_EQ(format_stack(p, c), "b a");
  EXPECT_FALSE(c.all_counters_zero());
}

TEST(Annotations, PredicateEvaluation) {
  auto p = parse_svas("counters: x\nalphabet: r3 r7 d0 d1\nL: goto L or M\nM: halt\n");
  ChoiceAnnotationTable t;
  t.digits[1] = {2, 3};
  t.entries[0] = {Predicate::nonzero(0), 0};
  auto c = Configuration::initial(p);
  c.counters[0] = 3;
  EXPECT_EQ(t.choose(0, c), 0);
  c.counters[0] = 0;
  EXPECT_EQ(t.choose(0, c), 1);

  t.entries[0] = {Predicate::top(1), 0};  // top(r7)
  c.stack = {0};                          // r3 on top
  EXPECT_EQ(t.choose(0, c), 1);
  c.stack = {0, 1};
  EXPECT_EQ(t.choose(0, c), 0);

  // allones(1): the maximal run of level-1 digits at the top has no zero-digit.
  EXPECT_TRUE(t.holds(Predicate::allones(1), Configuration{0, {0}, {0, 3, 3}}));
  EXPECT_FALSE(t.holds(Predicate::allones(1), Configuration{0, {0}, {3, 2, 3}}));
  EXPECT_TRUE(t.holds(Predicate::allones(1), Configuration{0, {0}, {2, 0, 3}}));
}

TEST(Annotations, SidecarRoundTripAndCoverage) {
  auto p = parse_svas("counters: x\nalphabet: z o\nL: goto L or M\nM: goto M or N\nN: goto N\nhalt\n");
  ChoiceAnnotationTable t;
  t.digits[1] = {0, 1};
  t.entries[0] = {Predicate::zero(0), 1};
  EXPECT_EQ(t.missing(p), std::vector<std::uint32_t>{1});
  t.entries[1] = {Predicate::allones(1), 0};
  EXPECT_TRUE(t.missing(p).empty());
  EXPECT_TRUE(t.well_formed(p));
  auto text = serialize_annotations(p, t);
  EXPECT_EQ(text, "level 1 z o\n0 zero(x) 1\n1 allones(1) 0\n");
  auto back = parse_annotations(p, text);
  EXPECT_EQ(serialize_annotations(p, back), text);
  EXPECT_THROW(parse_annotations(p, "0 zero(q) 1\n"), AnnotationError);
  EXPECT_THROW(parse_annotations(p, "0 sometimes(x) 1\n"), AnnotationError);
}
