#include "rulelab/rulevm.hpp"

#include <limits>

#include "rulelab/rng.hpp"

namespace rulelab {

void SelectionRule::validate() const {
  if (states.empty()) throw ValidationError("rule has no states");
  if (states.size() > kMaxStates) {
    throw ValidationError("rule has more than 65535 states");
  }
  const std::size_t count = states.size();
  for (std::size_t i = 0; i < count; ++i) {
    const RuleState& s = states[i];
    const std::string id = std::to_string(i + 1);
    if (s.move == 0) {
      throw ValidationError("state " + id + ": move must be nonzero");
    }
    for (const std::uint16_t target : {s.next_on_0, s.next_on_1, s.next_skip}) {
      if (target < 1 || target > count) {
        throw ValidationError("state " + id + ": undefined state " +
                              std::to_string(target));
      }
    }
  }
}

std::string_view to_string(HaltReason reason) {
  switch (reason) {
    case HaltReason::kHaltFlag:
      return "halt_flag";
    case HaltReason::kIndexOutOfRange:
      return "index_out_of_range";
    case HaltReason::kStepBudgetExhausted:
      return "step_budget_exhausted";
  }
  return "unknown";
}

SelectionResult run_rule(const SelectionRule& rule, const BitSequence& x) {
  rule.validate();
  if (x.empty()) throw ValidationError("run_rule requires a non-empty input");

  const std::int64_t n = static_cast<std::int64_t>(x.size());
  const std::uint64_t budget = 4 * x.size();

  SelectionResult result;
  std::vector<std::uint8_t> selected_mask(x.size() + 1, 0);

  std::size_t q = 0;  // 0-based index of the current state
  std::int64_t prev = 0;
  for (;;) {
    const RuleState& s = rule.states[q];
    if (s.halt) {
      result.halt_reason = HaltReason::kHaltFlag;
      return result;
    }
    const std::int64_t step = s.move > 0 ? 1 : -1;
    std::int64_t i = prev + s.move;
    while (i >= 1 && i <= n && selected_mask[static_cast<std::size_t>(i)]) {
      i += step;
    }
    if (i < 1 || i > n) {
      result.halt_reason = HaltReason::kIndexOutOfRange;
      return result;
    }
    ++result.examined_count;
    prev = i;
    if (s.select) {
      const bool bit = x.bit(static_cast<std::uint64_t>(i));
      result.selected.push_back(bit);
      result.selected_indices.push_back(static_cast<std::uint64_t>(i));
      selected_mask[static_cast<std::size_t>(i)] = 1;
      q = (bit ? s.next_on_1 : s.next_on_0) - 1;
    } else {
      q = s.next_skip - 1;
    }
    if (result.examined_count == budget) {
      result.halt_reason = HaltReason::kStepBudgetExhausted;
      return result;
    }
  }
}

SelectionRule identity_rule() {
  SelectionRule rule;
  rule.states.push_back(RuleState{1, true, false, 1, 1, 1});
  rule.name = "identity";
  return rule;
}

SelectionRule crystal_rule() {
  SelectionRule rule = identity_rule();
  rule.name = "crystal";
  return rule;
}

SelectionRule every_k_rule(std::uint32_t k) {
  if (k < 1 || k > std::numeric_limits<std::int16_t>::max()) {
    throw ValidationError("every_k_rule requires 1 <= k <= 32767");
  }
  SelectionRule rule;
  rule.states.push_back(
      RuleState{static_cast<std::int16_t>(k), true, false, 1, 1, 1});
  rule.name = "every:" + std::to_string(k);
  return rule;
}

SelectionRule constant_skip_rule(std::uint32_t k) {
  if (k < 1 || k + 1 > SelectionRule::kMaxStates) {
    throw ValidationError("constant_skip_rule requires 1 <= k <= 65534");
  }
  SelectionRule rule;
  rule.states.push_back(RuleState{1, true, false, 2, 2, 2});
  for (std::uint32_t j = 0; j < k; ++j) {
    const std::uint16_t next =
        static_cast<std::uint16_t>(j + 1 == k ? 1 : j + 3);
    rule.states.push_back(RuleState{1, false, false, next, next, next});
  }
  rule.name = "skip:" + std::to_string(k);
  return rule;
}

SelectionRule transient_response_rule(std::uint32_t dead_time) {
  if (dead_time < 1 || dead_time > 64) {
    throw ValidationError(
        "transient_response_rule requires 1 <= dead_time <= 64");
  }
  SelectionRule rule;
  // Selecting state: a 1 (a pulse) sends the machine into the refractory
  // chain; a 0 keeps it selecting.
  rule.states.push_back(RuleState{1, true, false, 1, 2, 1});
  for (std::uint32_t j = 0; j < dead_time; ++j) {
    const std::uint16_t next =
        static_cast<std::uint16_t>(j + 1 == dead_time ? 1 : j + 3);
    rule.states.push_back(RuleState{1, false, false, next, next, next});
  }
  rule.name = "transient:" + std::to_string(dead_time);
  return rule;
}

SelectionRule random_rule(std::uint64_t seed, std::uint32_t num_states) {
  if (num_states < 1 || num_states > 256) {
    throw ValidationError("random_rule requires 1 <= num_states <= 256");
  }
  Xoshiro256StarStar rng(seed);
  SelectionRule rule;
  rule.states.reserve(num_states);
  for (std::uint32_t i = 0; i < num_states; ++i) {
    RuleState s;
    static constexpr std::int16_t kMoves[6] = {-3, -2, -1, 1, 2, 3};
    s.move = kMoves[rng.next() % 6];
    s.select = (rng.next() & 1) != 0;
    s.halt = (rng.next() & 15) == 0;
    s.next_on_0 = static_cast<std::uint16_t>(rng.next() % num_states + 1);
    s.next_on_1 = static_cast<std::uint16_t>(rng.next() % num_states + 1);
    s.next_skip = static_cast<std::uint16_t>(rng.next() % num_states + 1);
    rule.states.push_back(s);
  }
  rule.name = "random:seed=" + std::to_string(seed) +
              ":states=" + std::to_string(num_states);
  return rule;
}

}  // namespace rulelab
