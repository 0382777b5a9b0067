#include <string>

#include "doctest.h"
#include "rulelab/rng.hpp"
#include "rulelab/rulevm.hpp"

using namespace rulelab;

namespace {

SelectionRule corpus_rule(SplitMix64& gen, std::uint32_t num_states) {
  SelectionRule rule;
  for (std::uint32_t i = 0; i < num_states; ++i) {
    RuleState s;
    // Exercise the whole move range, including the extremes.
    switch (gen.next() % 8) {
      case 0:
        s.move = 32767;
        break;
      case 1:
        s.move = -32768;
        break;
      default: {
        const std::int64_t m = static_cast<std::int64_t>(gen.next() % 40) - 20;
        s.move = static_cast<std::int16_t>(m >= 0 ? m + 1 : m);
        break;
      }
    }
    s.select = (gen.next() & 1) != 0;
    s.halt = (gen.next() & 3) == 0;
    s.next_on_0 = static_cast<std::uint16_t>(gen.next() % num_states + 1);
    s.next_on_1 = static_cast<std::uint16_t>(gen.next() % num_states + 1);
    s.next_skip = static_cast<std::uint16_t>(gen.next() % num_states + 1);
    rule.states.push_back(s);
  }
  return rule;
}

}  // namespace

TEST_CASE("dsl parses the single-state identity text") {
  const SelectionRule rule =
      parse_rule("state 1: move +1 select halt=no -> 1,1,1");
  CHECK(rule == identity_rule());
}

TEST_CASE("dsl tolerates comments, blank lines, and ordering") {
  const char* text =
      "# stride-2 with a halting tail\n"
      "\n"
      "state 2: move -1 skip halt=yes -> 1,1,1  # trailing comment\n"
      "state 1: move +2 select halt=no -> 1,1,2\n";
  const SelectionRule rule = parse_rule(text);
  REQUIRE(rule.states.size() == 2);
  CHECK(rule.states[0].move == 2);
  CHECK(rule.states[0].select);
  CHECK_FALSE(rule.states[0].halt);
  CHECK(rule.states[0].next_skip == 2);
  CHECK(rule.states[1].move == -1);
  CHECK_FALSE(rule.states[1].select);
  CHECK(rule.states[1].halt);
}

TEST_CASE("dsl rejects undefined and malformed states") {
  CHECK_THROWS_WITH_AS(
      parse_rule("state 1: move +1 select halt=no -> 1,3,1\n"
                 "state 2: move +1 select halt=no -> 1,1,1"),
      doctest::Contains("undefined state 3"), ValidationError);
  CHECK_THROWS_WITH_AS(
      parse_rule("state 1: move +1 select halt=no -> 1,1,1\n"
                 "state 1: move +1 select halt=no -> 1,1,1"),
      doctest::Contains("duplicate state 1"), ValidationError);
  CHECK_THROWS_WITH_AS(
      parse_rule("state 1: move 0 select halt=no -> 1,1,1"),
      doctest::Contains("move must be nonzero"), ValidationError);
  CHECK_THROWS_WITH_AS(
      parse_rule("state 3: move +1 select halt=no -> 3,3,3"),
      doctest::Contains("not contiguous"), ValidationError);
  CHECK_THROWS_AS(parse_rule(""), ValidationError);
  CHECK_THROWS_AS(parse_rule("state 1: move +99999 select halt=no -> 1,1,1"),
                  ValidationError);

  // Syntax errors carry line and column.
  try {
    parse_rule("state 1: move +1 select halt=no -> 1,1,1\n"
               "state 2: move +1 choose halt=no -> 1,1,1");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 18);
  }
}

TEST_CASE("dsl text round-trips over a generated corpus") {
  SplitMix64 gen(101);
  for (int iter = 0; iter < 500; ++iter) {
    const SelectionRule rule = corpus_rule(gen, 1 + gen.next() % 64);
    CHECK(parse_rule(serialize_rule_text(rule)) == rule);
  }
}

TEST_CASE("binary encoding is canonical") {
  const auto bytes = serialize_rule(identity_rule());
  REQUIRE(bytes.size() == 15);  // 6-byte header + one 9-byte record
  CHECK(bytes[0] == 'R');
  CHECK(bytes[1] == 'U');
  CHECK(bytes[2] == 'L');
  CHECK(bytes[3] == 'E');
  CHECK(bytes[4] == 1);  // state count, little-endian
  CHECK(bytes[5] == 0);
  CHECK(bytes[6] == 1);  // move = +1
  CHECK(bytes[7] == 0);
  CHECK(bytes[8] == 1);  // flags: select, no halt
  // Each transition is 1 as 2-byte little-endian.
  CHECK(bytes[9] == 1);
  CHECK(bytes[10] == 0);
  CHECK(bytes[11] == 1);
  CHECK(bytes[12] == 0);
  CHECK(bytes[13] == 1);
  CHECK(bytes[14] == 0);

  // A negative move encodes as two's complement.
  SelectionRule backward = identity_rule();
  backward.states[0].move = -2;
  const auto neg = serialize_rule(backward);
  CHECK(neg[6] == 0xFE);
  CHECK(neg[7] == 0xFF);
}

TEST_CASE("names are labels only") {
  SelectionRule a = identity_rule();
  SelectionRule b = identity_rule();
  a.name = "alpha";
  b.name = "beta";
  CHECK(a == b);
  CHECK(serialize_rule(a) == serialize_rule(b));
  CHECK(rule_complexity(crystal_rule()) == rule_complexity(identity_rule()));
}

TEST_CASE("complexity is the serialized bit length") {
  CHECK(rule_complexity(identity_rule()) == 120);  // 15 bytes
  // Every added state contributes one 9-byte record.
  SplitMix64 gen(55);
  for (const std::uint32_t states : {2u, 3u, 10u, 100u}) {
    const SelectionRule rule = corpus_rule(gen, states);
    CHECK(rule_complexity(rule) == 8 * (6 + 9 * states));
  }
  CHECK(rule_complexity(random_rule(1, 2)) ==
        rule_complexity(identity_rule()) + 72);
}

TEST_CASE("binary round-trips over a generated corpus") {
  SplitMix64 gen(202);
  for (int iter = 0; iter < 500; ++iter) {
    const SelectionRule rule = corpus_rule(gen, 1 + gen.next() % 64);
    CHECK(deserialize_rule(serialize_rule(rule)) == rule);
  }
}

TEST_CASE("binary decoder rejects malformed input") {
  const auto offset_of = [](std::vector<std::uint8_t> bytes) -> std::uint64_t {
    try {
      deserialize_rule(bytes);
    } catch (const FormatError& e) {
      return e.offset();
    }
    return static_cast<std::uint64_t>(-1);
  };

  CHECK(offset_of({'R', 'U', 'L', 'X', 1, 0}) == 3);  // bad magic
  CHECK(offset_of({'R', 'U'}) == 2);                  // truncated header
  CHECK(offset_of({'R', 'U', 'L', 'E', 0, 0}) == 4);  // zero states
  auto good = serialize_rule(identity_rule());
  auto truncated = good;
  truncated.pop_back();
  CHECK(offset_of(truncated) == 14);
  auto trailing = good;
  trailing.push_back(0);
  CHECK(offset_of(trailing) == 15);
  auto bad_flags = good;
  bad_flags[8] = 0x40;
  CHECK(offset_of(bad_flags) == 8);

  // Structurally invalid decoded rules are rejected as validation errors.
  auto bad_target = good;
  bad_target[9] = 2;  // next_on_0 = 2 with one state
  CHECK_THROWS_AS(deserialize_rule(bad_target), ValidationError);
  auto zero_move = good;
  zero_move[6] = 0;
  CHECK_THROWS_AS(deserialize_rule(zero_move), ValidationError);
}
