#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rulelab/complexity.hpp"
#include "rulelab/metrics.hpp"

namespace rulelab {

enum class OutputFormat { kCsv, kJson };

OutputFormat output_format_from_string(std::string_view name);

/// A full ensemble run: a bit source, a set of rule references, an
/// estimator, and a bound constant (fixed or calibrated from the run).
///
/// Rule references: `identity`, `crystal`, `every:<k>`, `skip:<k>`,
/// `transient:<d>`, `random:seed=<s>:states=<m>`, or `file:<path>` (a rule
/// file, resolved against base_dir when relative).
struct ExperimentConfig {
  SourceSpec source;
  std::uint64_t n = 0;
  std::vector<std::string> rules;
  Estimator estimator = Estimator::kLz78;
  std::optional<double> c;  // empty: calibrate from this run's records
  std::uint64_t replicates = 1;
  std::filesystem::path output;  // empty: no file output
  OutputFormat format = OutputFormat::kCsv;
  std::filesystem::path base_dir;

  void validate() const;
};

/// One (rule, replicate) outcome. bias/bound/satisfied are absent when the
/// rule selected nothing; halt_reason always records how the run stopped.
struct ExperimentRecord {
  std::string rule_id;
  std::uint64_t k_rule = 0;  // bits
  std::uint64_t seed = 0;    // effective replicate seed
  std::uint64_t sub_len = 0;
  std::optional<double> bias;
  double delta_hat = 0;  // bits, deficiency of the replicate's input
  std::optional<double> bound;
  std::optional<bool> satisfied;
  HaltReason halt_reason = HaltReason::kHaltFlag;
};

struct NamedRule {
  std::string id;
  SelectionRule rule;
};

/// Resolves a rule reference to a concrete rule. File contents may be rule
/// DSL text or the canonical binary encoding (detected by magic).
NamedRule resolve_rule_ref(std::string_view ref,
                           const std::filesystem::path& base_dir = {});

// Config files are flat `key = value` text; '#' starts a comment.
// Keys: source, seed, p, pattern, path, n, rules (comma-separated
// references), estimator, c (number or "calibrate"), replicates, output,
// format. Relative rule file references resolve against the config file's
// directory.
ExperimentConfig parse_config(std::istream& in,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

struct ExperimentResult {
  std::vector<ExperimentRecord> records;
  double c_used = 0;
  bool calibrated = false;
};

/// Runs every rule against every replicate. Replicate r (0-based) draws its
/// input with seed = source.seed + r (wrapping). Records are ordered by rule,
/// then replicate, and are a pure function of the config.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Per-record calibration statistic:
/// bias * sqrt(sub_len / (delta_hat + k_rule + 2*log2(k_rule))).
double calibration_score(double bias_value, std::uint64_t sub_len,
                         double delta_hat, std::uint64_t k_rule);

class CalibrationError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Largest calibration score over qualifying records (sub_len >= 100 and a
/// defined bias). Throws CalibrationError when fewer than 10 records
/// qualify.
double calibrate_c(const ExperimentConfig& cfg);
double calibrate_from_records(std::span<const ExperimentRecord> records);

struct GroupStats {
  std::string rule_id;
  std::uint64_t records_used = 0;
  double mean_bias = 0;
  double std_err = 0;    // standard error of the mean (0 when records < 2)
  bool excluded = false; // every replicate selected nothing
};

/// Compares the identity (crystal) rule's mean bias against a fixed ensemble
/// of ten 16-state random rules (seeds 1..10) on uniform inputs with base
/// seed 1.
struct CrystalSummary {
  std::uint64_t n = 0;
  std::uint64_t replicates = 0;
  double crystal_mean_bias = 0;
  bool stable = false;    // crystal mean <= every group mean + 3 std errors
  bool low_power = false; // replicates == 1, standard errors are zero
  std::vector<GroupStats> groups;
};

/// Requires n >= 2^16.
CrystalSummary crystal_stability_check(std::uint64_t n,
                                       std::uint64_t replicates);

// Record emission. CSV header, exactly:
//   rule_id,k_rule_bits,seed,sub_len,bias,delta_hat_bits,bound,satisfied,halt_reason
// JSON is an array of objects with the same field names. Absent values are
// empty CSV cells / JSON nulls; numbers use shortest round-trip decimals.
void emit(std::span<const ExperimentRecord> records, std::ostream& out,
          OutputFormat format);
void emit(std::span<const ExperimentRecord> records,
          const std::filesystem::path& path, OutputFormat format);

}  // namespace rulelab
