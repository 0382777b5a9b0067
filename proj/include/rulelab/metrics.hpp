#pragma once

#include <cstdint>

#include "rulelab/bitstream.hpp"
#include "rulelab/complexity.hpp"
#include "rulelab/rulevm.hpp"

namespace rulelab {

/// Deviation of the frequency of ones from one half, |#ones/len - 1/2|,
/// always in [0, 1/2]. Throws ValidationError on an empty sequence.
double bias(const BitSequence& sub);

/// Default constant for the stability bound, calibrated with
/// `rulelab calibrate --config configs/calibration.cfg` (the built-in graded
/// rule families on uniform inputs of 2^20 bits, 20 replicates).
inline constexpr double kCalibratedC = 0.128;

/// Stability bound c * sqrt((delta_hat + k_rule + 2*log2(k_rule)) / sub_len).
/// Requires sub_len >= 1, k_rule >= 1, delta_hat >= 0, and c > 0.
double stability_bound(double delta_hat_bits, std::uint64_t k_rule_bits,
                       std::uint64_t sub_len, double c);

/// A rule selected nothing, so the frequency of ones is undefined.
class EmptySelectionError : public ValidationError {
 public:
  explicit EmptySelectionError(HaltReason reason)
      : ValidationError("empty selection (" +
                        std::string(to_string(reason)) + ")"),
        halt_reason_(reason) {}

  HaltReason halt_reason() const { return halt_reason_; }

 private:
  HaltReason halt_reason_;
};

/// Measured bias of a selected subsequence against the stability bound
/// assembled from the rule's complexity and the input's deficiency.
struct BoundReport {
  double bias = 0;
  double bound = 0;
  double c_used = 0;
  double delta_hat = 0;       // bits
  std::uint64_t k_rule = 0;   // bits
  std::uint64_t sub_len = 0;  // selected bits
  bool satisfied = false;     // bias <= bound
};

/// Runs the rule on x and assembles the full report. Throws
/// EmptySelectionError when the rule selects nothing.
BoundReport bound_report(const BitSequence& x, const SelectionRule& rule,
                         Estimator estimator, double c = kCalibratedC);

}  // namespace rulelab
