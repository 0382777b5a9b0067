#include "rulelab/metrics.hpp"

#include <cmath>
#include <cstdlib>

namespace rulelab {

namespace {

double bias_of_counts(std::uint64_t ones, std::uint64_t len) {
  // |ones/len - 1/2| = |2*ones - len| / (2*len), kept in integers until the
  // final division.
  const std::uint64_t twice_ones = 2 * ones;
  const std::uint64_t distance =
      twice_ones >= len ? twice_ones - len : len - twice_ones;
  return static_cast<double>(distance) / (2.0 * static_cast<double>(len));
}

}  // namespace

double bias(const BitSequence& sub) {
  if (sub.empty()) {
    throw ValidationError("bias of an empty sequence is undefined");
  }
  return bias_of_counts(sub.ones_count(), sub.size());
}

double stability_bound(double delta_hat_bits, std::uint64_t k_rule_bits,
                       std::uint64_t sub_len, double c) {
  if (sub_len == 0) throw ValidationError("empty selection, bound undefined");
  if (k_rule_bits == 0) {
    throw ValidationError("rule complexity must be at least 1 bit");
  }
  if (delta_hat_bits < 0) {
    throw ValidationError("deficiency must be non-negative");
  }
  if (!(c > 0)) throw ValidationError("bound constant c must be positive");
  const double k = static_cast<double>(k_rule_bits);
  const double numerator = delta_hat_bits + k + 2.0 * std::log2(k);
  return c * std::sqrt(numerator / static_cast<double>(sub_len));
}

BoundReport bound_report(const BitSequence& x, const SelectionRule& rule,
                         Estimator estimator, double c) {
  const SelectionResult result = run_rule(rule, x);
  if (result.selected.empty()) {
    throw EmptySelectionError(result.halt_reason);
  }

  BoundReport report;
  report.sub_len = result.selected.size();
  report.bias = bias_of_counts(result.selected.ones_count(), report.sub_len);
  report.delta_hat = deficiency(x, estimator);
  report.k_rule = rule_complexity(rule);
  report.c_used = c;
  report.bound = stability_bound(report.delta_hat, report.k_rule,
                                 report.sub_len, c);
  report.satisfied = report.bias <= report.bound;
  return report;
}

}  // namespace rulelab
