#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rulelab/bitstream.hpp"

namespace rulelab {

/// One state of a selection rule. Transitions name 1-based state ids.
struct RuleState {
  std::int16_t move = 1;        // displacement to the next candidate; never 0
  bool select = true;           // select the examined bit?
  bool halt = false;            // stop before examining anything?
  std::uint16_t next_on_0 = 1;  // taken when a selected bit reads 0
  std::uint16_t next_on_1 = 1;  // taken when a selected bit reads 1
  std::uint16_t next_skip = 1;  // taken when the examined bit was not selected

  friend bool operator==(const RuleState&, const RuleState&) = default;
};

/// A selection rule: a finite-state program that walks over a bit sequence,
/// selecting some of the positions it examines. State 1 is the start state.
/// The optional name is a label only; it takes no part in comparison,
/// serialization, or complexity.
struct SelectionRule {
  static constexpr std::size_t kMaxStates = 65535;

  std::vector<RuleState> states;
  std::string name;

  /// Structural validity: 1..kMaxStates states, every move nonzero, every
  /// transition target a defined state. Throws ValidationError naming the
  /// offending state.
  void validate() const;

  friend bool operator==(const SelectionRule& a, const SelectionRule& b) {
    return a.states == b.states;
  }
};

enum class HaltReason : std::uint8_t {
  kHaltFlag,            // the current state has halt set
  kIndexOutOfRange,     // next candidate fell outside [1, n]
  kStepBudgetExhausted  // examination budget of 4*n reached
};

std::string_view to_string(HaltReason reason);

struct SelectionResult {
  BitSequence selected;                         // selected bits, in order
  std::vector<std::uint64_t> selected_indices;  // 1-based, pairwise distinct
  std::uint64_t examined_count = 0;
  HaltReason halt_reason = HaltReason::kHaltFlag;
};

/// Runs a rule against a sequence. Per step, with current state q, previous
/// examined index prev (initially 0):
///
///   1. if q.halt, stop (halt_flag);
///   2. candidate i = prev + q.move; while i lies in [1, n] but is already
///      selected, step i further by sign(q.move);
///   3. if i < 1 or i > n, stop (index_out_of_range);
///   4. record the examination (prev = i). If q.select, read x_i, append it
///      to the selection, and go to next_on_0/next_on_1 by its value;
///      otherwise go to next_skip without reading the bit;
///   5. after 4*n examinations, stop (step_budget_exhausted).
///
/// Already-selected positions are never examined again; positions examined
/// without selection may be revisited. The result is a pure function of
/// (rule, x). Requires x non-empty.
SelectionResult run_rule(const SelectionRule& rule, const BitSequence& x);

// Built-in rule families.

/// One state: move +1, select, never halt. Selects the whole input.
SelectionRule identity_rule();

/// Same program as identity_rule, under the crystal label.
SelectionRule crystal_rule();

/// One state: move +k, select. Selects positions k, 2k, 3k, ...
SelectionRule every_k_rule(std::uint32_t k);

/// Select one bit, then examine-but-skip the next k positions, repeatedly.
/// Built from k+1 states.
SelectionRule constant_skip_rule(std::uint32_t k);

/// Device with a recovery time: selects bits until it reads a 1, then
/// examines-but-skips the next dead_time positions before selecting again.
/// Built from dead_time+1 states; dead_time must lie in [1, 64].
SelectionRule transient_response_rule(std::uint32_t dead_time);

/// Structurally valid pseudorandom rule, a pure function of
/// (seed, num_states) with num_states in [1, 256]. Per state, drawn in field
/// order from xoshiro256**(seed): move uniform over {-3,-2,-1,1,2,3}
/// (next() % 6), select = next() & 1, halt = (next() & 15) == 0, then
/// next_on_0, next_on_1, next_skip each uniform over the state ids.
SelectionRule random_rule(std::uint64_t seed, std::uint32_t num_states);

// Rule DSL. One state per line:
//
//   state <id>: move <signed int> <select|skip> halt=<yes|no> -> <on0>,<on1>,<skip>
//
// '#' starts a comment; blank lines are ignored. State ids must be exactly
// 1..N; state 1 is the start state.
SelectionRule parse_rule(std::string_view text);
std::string serialize_rule_text(const SelectionRule& rule);

// Canonical binary encoding: magic "RULE", state count as 2-byte
// little-endian, then one 9-byte record per state: move (2B little-endian,
// two's complement), flags (1B: bit0 = select, bit1 = halt), next_on_0,
// next_on_1, next_skip (2B little-endian each). Bit-exact: equal rules
// produce identical bytes.
std::vector<std::uint8_t> serialize_rule(const SelectionRule& rule);
SelectionRule deserialize_rule(std::span<const std::uint8_t> bytes);

/// Program-length proxy for a rule's descriptive complexity: 8 times the
/// canonical serialized byte length. Strictly increasing in state count.
std::uint64_t rule_complexity(const SelectionRule& rule);

}  // namespace rulelab
