#include "rulelab/complexity.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <string>

namespace rulelab {

Estimator estimator_from_string(std::string_view name) {
  if (name == "lz78") return Estimator::kLz78;
  if (name == "block_entropy") return Estimator::kBlockEntropy;
  throw ValidationError("unknown estimator '" + std::string(name) +
                        "' (expected lz78 or block_entropy)");
}

std::string_view to_string(Estimator estimator) {
  switch (estimator) {
    case Estimator::kLz78:
      return "lz78";
    case Estimator::kBlockEntropy:
      return "block_entropy";
  }
  return "unknown";
}

namespace {

// ceil(log2(v)) for v >= 1.
std::uint64_t ceil_log2(std::uint64_t v) {
  return std::bit_width(v - 1);
}

double clamp_deficiency(std::uint64_t n, double k_hat) {
  return std::max(0.0, static_cast<double>(n) - k_hat);
}

}  // namespace

ComplexityEstimate lz78_estimate(const BitSequence& x) {
  if (x.empty()) throw ValidationError("lz78_estimate requires a non-empty input");

  // Binary trie over phrases; 0 marks a missing child.
  std::vector<std::array<std::uint32_t, 2>> children;
  children.push_back({0, 0});

  std::uint64_t phrase_count = 0;
  std::uint32_t node = 0;
  for (std::uint64_t pos = 1; pos <= x.size(); ++pos) {
    const unsigned b = x.bit(pos) ? 1 : 0;
    const std::uint32_t child = children[node][b];
    if (child != 0) {
      node = child;
    } else {
      children[node][b] = static_cast<std::uint32_t>(children.size());
      children.push_back({0, 0});
      ++phrase_count;
      node = 0;
    }
  }
  if (node != 0) ++phrase_count;  // trailing partial phrase

  // Sum of ceil(log2(j+1)) + 1 over phrases j = 1..c, computed by grouping
  // the j with equal pointer width.
  std::uint64_t k_bits = phrase_count;  // one literal bit per phrase
  std::uint64_t lo = 1;
  while (lo <= phrase_count) {
    const std::uint64_t width = ceil_log2(lo + 1);
    // ceil(log2(j+1)) == width for j in [2^(width-1), 2^width - 1].
    const std::uint64_t hi =
        std::min(phrase_count, (std::uint64_t{1} << width) - 1);
    k_bits += (hi - lo + 1) * width;
    lo = hi + 1;
  }

  ComplexityEstimate est;
  est.estimator = Estimator::kLz78;
  est.n = x.size();
  est.k_hat = static_cast<double>(k_bits);
  est.deficiency = clamp_deficiency(est.n, est.k_hat);
  return est;
}

ComplexityEstimate block_entropy_estimate(const BitSequence& x,
                                          unsigned block) {
  if (block < 1 || block > 16) {
    throw ValidationError("block size must lie in [1, 16]");
  }
  if (x.size() < block) {
    throw ValidationError("input shorter than one block");
  }

  const std::uint64_t block_count = x.size() / block;
  std::vector<std::uint64_t> counts(std::uint64_t{1} << block, 0);
  for (std::uint64_t j = 0; j < block_count; ++j) {
    std::uint64_t symbol = 0;
    for (unsigned t = 0; t < block; ++t) {
      symbol = (symbol << 1) | (x.bit(j * block + t + 1) ? 1 : 0);
    }
    ++counts[symbol];
  }

  double entropy = 0;
  for (const std::uint64_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(block_count);
    entropy -= p * std::log2(p);
  }

  const double model_cost =
      static_cast<double>((std::uint64_t{1} << block) * ceil_log2(x.size() + 1));

  ComplexityEstimate est;
  est.estimator = Estimator::kBlockEntropy;
  est.n = x.size();
  est.k_hat = static_cast<double>(block_count) * entropy + model_cost;
  est.deficiency = clamp_deficiency(est.n, est.k_hat);
  return est;
}

ComplexityEstimate estimate(const BitSequence& x, Estimator estimator,
                            unsigned block) {
  switch (estimator) {
    case Estimator::kLz78:
      return lz78_estimate(x);
    case Estimator::kBlockEntropy:
      return block_entropy_estimate(x, block);
  }
  throw ValidationError("unknown estimator");
}

double deficiency(const BitSequence& x, Estimator estimator, unsigned block) {
  return estimate(x, estimator, block).deficiency;
}

std::vector<CurvePoint> prefix_complexity_curve(const BitSequence& x,
                                                Estimator estimator,
                                                std::uint64_t stride,
                                                unsigned block) {
  if (stride < 1) throw ValidationError("stride must be at least 1");
  std::vector<CurvePoint> curve;
  for (std::uint64_t len = stride; len <= x.size(); len += stride) {
    const ComplexityEstimate est = estimate(x.prefix(len), estimator, block);
    curve.push_back({len, est.k_hat - static_cast<double>(len)});
  }
  return curve;
}

}  // namespace rulelab
