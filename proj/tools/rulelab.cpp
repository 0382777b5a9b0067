// rulelab command-line interface.
//
// Exit codes: 0 success, 1 validation or input-format error, 2 I/O error.
// Machine-readable results go to stdout as key=value lines; diagnostics go
// to stderr. With --out -, payload bytes go to stdout and key=value lines
// move to stderr.

#include <charconv>
#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rulelab/bitstream.hpp"
#include "rulelab/complexity.hpp"
#include "rulelab/experiment.hpp"
#include "rulelab/metrics.hpp"
#include "rulelab/rulevm.hpp"

namespace {

using namespace rulelab;

std::string fmt(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

BitFileFormat format_from_string(const std::string& name) {
  if (name == "ascii01") return BitFileFormat::kAscii01;
  if (name == "packed") return BitFileFormat::kPacked;
  throw ValidationError("unknown format '" + name +
                        "' (expected ascii01 or packed)");
}

struct GenerateArgs {
  std::string source = "uniform";
  std::uint64_t seed = 0;
  std::string p = "1/2";
  std::string pattern;
  std::uint64_t n = 0;
  std::string out;
  std::string format = "ascii01";
};

int run_generate(const GenerateArgs& args) {
  SourceSpec spec;
  if (args.source == "uniform") {
    spec = SourceSpec::uniform(args.seed);
  } else if (args.source == "bernoulli") {
    spec = SourceSpec::bernoulli(parse_rational(args.p), args.seed);
  } else if (args.source == "periodic") {
    spec = SourceSpec::periodic(BitSequence::from_string(args.pattern));
  } else {
    throw ValidationError("unknown source '" + args.source +
                          "' (expected uniform, bernoulli, or periodic)");
  }
  const BitSequence seq = generate(spec, args.n);
  const BitFileFormat format = format_from_string(args.format);
  if (args.out == "-") {
    write_bits(seq, std::cout, format);
  } else {
    write_bits(seq, std::filesystem::path(args.out), format);
  }
  return 0;
}

struct SelectArgs {
  std::string rule;
  std::string in;
  std::string out;
  std::string format = "ascii01";
};

int run_select(const SelectArgs& args) {
  const NamedRule named = resolve_rule_ref(args.rule);
  const BitSequence x = read_bits_auto(args.in);
  const SelectionResult result = run_rule(named.rule, x);

  const bool payload_on_stdout = args.out == "-";
  std::ostream& kv = payload_on_stdout ? std::cerr : std::cout;
  if (payload_on_stdout) {
    write_bits(result.selected, std::cout, format_from_string(args.format));
  } else if (!args.out.empty()) {
    write_bits(result.selected, std::filesystem::path(args.out),
               format_from_string(args.format));
  }
  kv << "sub_len=" << result.selected.size() << '\n';
  kv << "halt_reason=" << to_string(result.halt_reason) << '\n';
  return 0;
}

int run_complexity(const std::string& in, const std::string& estimator,
                   unsigned block) {
  const BitSequence x = read_bits_auto(in);
  const ComplexityEstimate est =
      estimate(x, estimator_from_string(estimator), block);
  std::cout << "estimator=" << to_string(est.estimator) << '\n';
  std::cout << "n=" << est.n << '\n';
  std::cout << "k_hat=" << fmt(est.k_hat) << '\n';
  std::cout << "deficiency=" << fmt(est.deficiency) << '\n';
  return 0;
}

int run_deficiency(const std::string& in, const std::string& estimator,
                   unsigned block) {
  const BitSequence x = read_bits_auto(in);
  std::cout << "deficiency="
            << fmt(deficiency(x, estimator_from_string(estimator), block))
            << '\n';
  return 0;
}

int run_bias(const std::string& in) {
  const BitSequence x = read_bits_auto(in);
  std::cout << "bias=" << fmt(bias(x)) << '\n';
  return 0;
}

int run_bound(const std::string& in, const std::string& rule,
              const std::string& estimator, double c) {
  const NamedRule named = resolve_rule_ref(rule);
  const BitSequence x = read_bits_auto(in);
  const BoundReport report =
      bound_report(x, named.rule, estimator_from_string(estimator), c);
  std::cout << "bias=" << fmt(report.bias) << '\n';
  std::cout << "bound=" << fmt(report.bound) << '\n';
  std::cout << "satisfied=" << (report.satisfied ? "true" : "false") << '\n';
  std::cout << "delta_hat=" << fmt(report.delta_hat) << '\n';
  std::cout << "k_rule=" << report.k_rule << '\n';
  std::cout << "sub_len=" << report.sub_len << '\n';
  std::cout << "c=" << fmt(report.c_used) << '\n';
  return 0;
}

int run_curve(const std::string& in, const std::string& estimator,
              std::uint64_t stride, unsigned block) {
  const BitSequence x = read_bits_auto(in);
  const auto curve = prefix_complexity_curve(
      x, estimator_from_string(estimator), stride, block);
  std::cout << "points=" << curve.size() << '\n';
  for (std::size_t i = 0; i < curve.size(); ++i) {
    std::cout << "point_" << (i + 1) << '=' << curve[i].n << ','
              << fmt(curve[i].k_hat_minus_n) << '\n';
  }
  return 0;
}

int run_experiment_cmd(const std::string& config) {
  const ExperimentConfig cfg = load_config(config);
  const ExperimentResult result = run_experiment(cfg);
  if (!cfg.output.empty()) {
    emit(result.records, cfg.output, cfg.format);
    std::cout << "output=" << cfg.output.string() << '\n';
  }
  std::cout << "records=" << result.records.size() << '\n';
  std::cout << "c=" << fmt(result.c_used) << '\n';
  std::cout << "calibrated=" << (result.calibrated ? "true" : "false")
            << '\n';
  return 0;
}

int run_calibrate(const std::string& config) {
  const ExperimentConfig cfg = load_config(config);
  std::cout << "c_hat=" << fmt(calibrate_c(cfg)) << '\n';
  return 0;
}

int run_validate_rule(const std::string& rule) {
  const NamedRule named = resolve_rule_ref(rule);
  std::cout << "valid=true\n";
  std::cout << "states=" << named.rule.states.size() << '\n';
  std::cout << "complexity_bits=" << rule_complexity(named.rule) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selection-rule stability laboratory for binary sequences"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate_cmd =
      app.add_subcommand("generate", "Generate a bit sequence");
  generate_cmd->add_option("--source", gen.source,
                           "uniform, bernoulli, or periodic");
  generate_cmd->add_option("--seed", gen.seed, "source seed");
  generate_cmd->add_option("--p", gen.p, "bernoulli p (rational or decimal)");
  generate_cmd->add_option("--pattern", gen.pattern, "periodic pattern");
  generate_cmd->add_option("--n", gen.n, "number of bits")->required();
  generate_cmd->add_option("--out", gen.out, "output path, or -")->required();
  generate_cmd->add_option("--format", gen.format, "ascii01 or packed");

  SelectArgs sel;
  auto* select_cmd =
      app.add_subcommand("select", "Run a selection rule over a sequence");
  select_cmd->add_option("--rule", sel.rule, "rule reference or file")
      ->required();
  select_cmd->add_option("--in", sel.in, "input bit file")->required();
  select_cmd->add_option("--out", sel.out, "output path, or -");
  select_cmd->add_option("--format", sel.format, "output format");

  std::string in, estimator = "lz78", rule;
  unsigned block = 8;
  auto* complexity_cmd =
      app.add_subcommand("complexity", "Estimate sequence complexity");
  complexity_cmd->add_option("--in", in, "input bit file")->required();
  complexity_cmd->add_option("--estimator", estimator,
                             "lz78 or block_entropy");
  complexity_cmd->add_option("--block", block, "block size (block_entropy)");

  auto* deficiency_cmd =
      app.add_subcommand("deficiency", "Randomness deficiency of a sequence");
  deficiency_cmd->add_option("--in", in, "input bit file")->required();
  deficiency_cmd->add_option("--estimator", estimator,
                             "lz78 or block_entropy");
  deficiency_cmd->add_option("--block", block, "block size (block_entropy)");

  auto* bias_cmd =
      app.add_subcommand("bias", "Deviation of the ones frequency from 1/2");
  bias_cmd->add_option("--in", in, "input bit file")->required();

  double c = kCalibratedC;
  auto* bound_cmd = app.add_subcommand(
      "bound", "Stability bound report for a rule on a sequence");
  bound_cmd->add_option("--in", in, "input bit file")->required();
  bound_cmd->add_option("--rule", rule, "rule reference or file")->required();
  bound_cmd->add_option("--estimator", estimator, "lz78 or block_entropy");
  bound_cmd->add_option("--c", c, "bound constant");

  std::uint64_t stride = 4096;
  auto* curve_cmd = app.add_subcommand(
      "curve", "Prefix complexity curve (k_hat - n per prefix)");
  curve_cmd->add_option("--in", in, "input bit file")->required();
  curve_cmd->add_option("--estimator", estimator, "lz78 or block_entropy");
  curve_cmd->add_option("--stride", stride, "prefix stride");
  curve_cmd->add_option("--block", block, "block size (block_entropy)");

  std::string config;
  auto* experiment_cmd =
      app.add_subcommand("experiment", "Run an experiment config");
  experiment_cmd->add_option("--config", config, "config file")->required();

  auto* calibrate_cmd = app.add_subcommand(
      "calibrate", "Calibrate the bound constant from a config");
  calibrate_cmd->add_option("--config", config, "config file")->required();

  auto* validate_cmd =
      app.add_subcommand("validate-rule", "Validate a rule file");
  validate_cmd->add_option("--rule", rule, "rule reference or file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (generate_cmd->parsed()) return run_generate(gen);
    if (select_cmd->parsed()) return run_select(sel);
    if (complexity_cmd->parsed()) return run_complexity(in, estimator, block);
    if (deficiency_cmd->parsed()) return run_deficiency(in, estimator, block);
    if (bias_cmd->parsed()) return run_bias(in);
    if (bound_cmd->parsed()) return run_bound(in, rule, estimator, c);
    if (curve_cmd->parsed()) return run_curve(in, estimator, stride, block);
    if (experiment_cmd->parsed()) return run_experiment_cmd(config);
    if (calibrate_cmd->parsed()) return run_calibrate(config);
    if (validate_cmd->parsed()) return run_validate_rule(rule);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
