#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "rulelab/bitstream.hpp"

namespace rulelab {

enum class Estimator { kLz78, kBlockEntropy };

Estimator estimator_from_string(std::string_view name);
std::string_view to_string(Estimator estimator);

/// A computable upper-bound estimate of a sequence's descriptive complexity,
/// with the derived randomness deficiency.
struct ComplexityEstimate {
  Estimator estimator;
  double k_hat = 0;       // estimated complexity, bits
  double deficiency = 0;  // max(0, n - k_hat)
  std::uint64_t n = 0;
};

/// LZ78 incremental parse into c distinct phrases (a trailing partial phrase
/// counts as one). Phrase j is costed as a back-reference of
/// ceil(log2(j+1)) bits plus one literal bit, so
/// k_hat = sum_{j=1..c} (ceil(log2(j+1)) + 1).
ComplexityEstimate lz78_estimate(const BitSequence& x);

/// Empirical entropy of non-overlapping block-size blocks plus an explicit
/// count-table cost: k_hat = floor(n/b) * H_b + 2^b * ceil(log2(n+1)).
/// block must lie in [1, 16] and x must hold at least block bits.
ComplexityEstimate block_entropy_estimate(const BitSequence& x,
                                          unsigned block);

/// Dispatches to the named estimator (block entropy uses the given block
/// size, default 8).
ComplexityEstimate estimate(const BitSequence& x, Estimator estimator,
                            unsigned block = 8);

/// Randomness deficiency n - k_hat, clamped to [0, n].
double deficiency(const BitSequence& x, Estimator estimator,
                  unsigned block = 8);

struct CurvePoint {
  std::uint64_t n = 0;
  double k_hat_minus_n = 0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

/// Evaluates the estimator on prefixes of length stride, 2*stride, ... and
/// returns k_hat - n per prefix. The curve stays bounded below for
/// incompressible sources and diverges to -infinity for regular ones.
std::vector<CurvePoint> prefix_complexity_curve(const BitSequence& x,
                                                Estimator estimator,
                                                std::uint64_t stride,
                                                unsigned block = 8);

}  // namespace rulelab
