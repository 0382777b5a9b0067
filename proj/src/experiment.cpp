#include "rulelab/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace rulelab {

OutputFormat output_format_from_string(std::string_view name) {
  if (name == "csv") return OutputFormat::kCsv;
  if (name == "json") return OutputFormat::kJson;
  throw ValidationError("unknown output format '" + std::string(name) +
                        "' (expected csv or json)");
}

void ExperimentConfig::validate() const {
  source.validate();
  if (n < 1) throw ValidationError("experiment requires n >= 1");
  if (replicates < 1) throw ValidationError("replicates must be at least 1");
  if (rules.empty()) throw ValidationError("experiment requires at least one rule");
}

namespace {

std::uint64_t parse_u64_field(std::string_view text, std::string_view what) {
  std::uint64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ValidationError("invalid " + std::string(what) + ": '" +
                          std::string(text) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Splits "random:seed=1:states=8" style parameter tails.
std::uint64_t keyed_param(std::string_view part, std::string_view key,
                          std::string_view ref) {
  if (!part.starts_with(key) || part.size() <= key.size() ||
      part[key.size()] != '=') {
    throw ValidationError("malformed rule reference '" + std::string(ref) +
                          "': expected " + std::string(key) + "=<value>");
  }
  return parse_u64_field(part.substr(key.size() + 1), key);
}

}  // namespace

NamedRule resolve_rule_ref(std::string_view ref,
                           const std::filesystem::path& base_dir) {
  const std::string id(ref);
  if (ref == "identity") return {id, identity_rule()};
  if (ref == "crystal") return {id, crystal_rule()};
  if (ref.starts_with("every:")) {
    return {id, every_k_rule(static_cast<std::uint32_t>(
                    parse_u64_field(ref.substr(6), "every stride")))};
  }
  if (ref.starts_with("skip:")) {
    return {id, constant_skip_rule(static_cast<std::uint32_t>(
                    parse_u64_field(ref.substr(5), "skip count")))};
  }
  if (ref.starts_with("transient:")) {
    return {id, transient_response_rule(static_cast<std::uint32_t>(
                    parse_u64_field(ref.substr(10), "dead time")))};
  }
  if (ref.starts_with("random:")) {
    std::string_view tail = ref.substr(7);
    const auto colon = tail.find(':');
    if (colon == std::string_view::npos) {
      throw ValidationError("malformed rule reference '" + id +
                            "': expected random:seed=<s>:states=<m>");
    }
    const std::uint64_t seed = keyed_param(tail.substr(0, colon), "seed", ref);
    const std::uint64_t states =
        keyed_param(tail.substr(colon + 1), "states", ref);
    return {id, random_rule(seed, static_cast<std::uint32_t>(states))};
  }

  std::string_view path_part = ref;
  if (ref.starts_with("file:")) path_part = ref.substr(5);
  std::filesystem::path path(path_part);
  if (path.is_relative() && !base_dir.empty()) path = base_dir / path;

  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open rule file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();
  if (content.starts_with("RULE")) {
    return {id, deserialize_rule(std::span<const std::uint8_t>(
                    reinterpret_cast<const std::uint8_t*>(content.data()),
                    content.size()))};
  }
  return {id, parse_rule(content)};
}

ExperimentConfig parse_config(std::istream& in,
                              const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  cfg.base_dir = base_dir;

  std::string source_kind = "uniform";
  std::string pattern, p_text;
  std::string source_path;
  bool have_n = false;

  std::string line;
  std::uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("expected key = value", line_no, 1);
    }
    const std::string key(trim(view.substr(0, eq)));
    const std::string value(trim(view.substr(eq + 1)));

    if (key == "source") {
      source_kind = value;
    } else if (key == "seed") {
      cfg.source.seed = parse_u64_field(value, "seed");
    } else if (key == "p") {
      p_text = value;
    } else if (key == "pattern") {
      pattern = value;
    } else if (key == "path") {
      source_path = value;
    } else if (key == "n") {
      cfg.n = parse_u64_field(value, "n");
      have_n = true;
    } else if (key == "rules") {
      std::string_view rest(value);
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view item =
            trim(rest.substr(0, comma));
        if (!item.empty()) cfg.rules.emplace_back(item);
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
      }
    } else if (key == "estimator") {
      cfg.estimator = estimator_from_string(value);
    } else if (key == "c") {
      if (value == "calibrate") {
        cfg.c.reset();
      } else {
        double c = 0;
        const auto [ptr, ec] =
            std::from_chars(value.data(), value.data() + value.size(), c);
        if (ec != std::errc{} || ptr != value.data() + value.size() ||
            !(c > 0)) {
          throw ValidationError("invalid c: '" + value +
                                "' (expected a positive number or calibrate)");
        }
        cfg.c = c;
      }
    } else if (key == "replicates") {
      cfg.replicates = parse_u64_field(value, "replicates");
    } else if (key == "output") {
      cfg.output = value;
    } else if (key == "format") {
      cfg.format = output_format_from_string(value);
    } else {
      throw ValidationError("unknown config key '" + key + "'");
    }
  }

  if (source_kind == "uniform") {
    cfg.source.kind = SourceKind::kUniform;
  } else if (source_kind == "bernoulli") {
    cfg.source.kind = SourceKind::kBernoulli;
    if (p_text.empty()) {
      throw ValidationError("bernoulli source requires p");
    }
    cfg.source.p = parse_rational(p_text);
  } else if (source_kind == "periodic") {
    cfg.source.kind = SourceKind::kPeriodic;
    cfg.source.pattern = BitSequence::from_string(pattern);
  } else if (source_kind == "file") {
    cfg.source.kind = SourceKind::kFile;
    std::filesystem::path p(source_path);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    cfg.source.path = p;
  } else {
    throw ValidationError("unknown source '" + source_kind + "'");
  }

  if (!have_n) throw ValidationError("config is missing n");
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  return parse_config(in, path.parent_path());
}

namespace {

std::vector<ExperimentRecord> compute_records(const ExperimentConfig& cfg) {
  cfg.validate();

  std::vector<NamedRule> rules;
  rules.reserve(cfg.rules.size());
  for (const std::string& ref : cfg.rules) {
    rules.push_back(resolve_rule_ref(ref, cfg.base_dir));
  }

  // records[rule][replicate], flattened rule-major at the end.
  std::vector<std::vector<ExperimentRecord>> grouped(rules.size());
  for (auto& g : grouped) g.resize(cfg.replicates);

  for (std::uint64_t r = 0; r < cfg.replicates; ++r) {
    SourceSpec source = cfg.source;
    source.seed = cfg.source.seed + r;  // wrapping
    const BitSequence x = generate(source, cfg.n);
    const double delta_hat = deficiency(x, cfg.estimator);

    for (std::size_t ri = 0; ri < rules.size(); ++ri) {
      ExperimentRecord rec;
      rec.rule_id = rules[ri].id;
      rec.k_rule = rule_complexity(rules[ri].rule);
      rec.seed = source.seed;
      rec.delta_hat = delta_hat;

      const SelectionResult result = run_rule(rules[ri].rule, x);
      rec.sub_len = result.selected.size();
      rec.halt_reason = result.halt_reason;
      if (rec.sub_len > 0) {
        rec.bias = bias(result.selected);
      }
      grouped[ri][r] = std::move(rec);
    }
  }

  std::vector<ExperimentRecord> records;
  records.reserve(rules.size() * cfg.replicates);
  for (auto& g : grouped) {
    for (auto& rec : g) records.push_back(std::move(rec));
  }
  return records;
}

void fill_bounds(std::vector<ExperimentRecord>& records, double c) {
  for (ExperimentRecord& rec : records) {
    if (!rec.bias.has_value()) continue;
    rec.bound = stability_bound(rec.delta_hat, rec.k_rule, rec.sub_len, c);
    rec.satisfied = *rec.bias <= *rec.bound;
  }
}

}  // namespace

double calibration_score(double bias_value, std::uint64_t sub_len,
                         double delta_hat, std::uint64_t k_rule) {
  const double k = static_cast<double>(k_rule);
  const double denominator = delta_hat + k + 2.0 * std::log2(k);
  return bias_value * std::sqrt(static_cast<double>(sub_len) / denominator);
}

double calibrate_from_records(std::span<const ExperimentRecord> records) {
  std::uint64_t qualifying = 0;
  double c_hat = 0;
  for (const ExperimentRecord& rec : records) {
    if (!rec.bias.has_value() || rec.sub_len < 100) continue;
    ++qualifying;
    c_hat = std::max(c_hat, calibration_score(*rec.bias, rec.sub_len,
                                              rec.delta_hat, rec.k_rule));
  }
  if (qualifying < 10) {
    throw CalibrationError("calibration needs at least 10 records with 100+ "
                           "selected bits, got " +
                           std::to_string(qualifying));
  }
  return c_hat;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult result;
  result.records = compute_records(cfg);
  if (cfg.c.has_value()) {
    result.c_used = *cfg.c;
    result.calibrated = false;
  } else {
    result.c_used = calibrate_from_records(result.records);
    result.calibrated = true;
  }
  fill_bounds(result.records, result.c_used);
  return result;
}

double calibrate_c(const ExperimentConfig& cfg) {
  return calibrate_from_records(compute_records(cfg));
}

CrystalSummary crystal_stability_check(std::uint64_t n,
                                       std::uint64_t replicates) {
  if (n < (std::uint64_t{1} << 16)) {
    throw ValidationError("crystal_stability_check requires n >= 65536");
  }
  if (replicates < 1) throw ValidationError("replicates must be at least 1");

  std::vector<NamedRule> rules;
  rules.push_back({"crystal", crystal_rule()});
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    rules.push_back({"random:seed=" + std::to_string(seed) + ":states=16",
                     random_rule(seed, 16)});
  }

  std::vector<std::vector<double>> biases(rules.size());
  for (std::uint64_t r = 0; r < replicates; ++r) {
    const BitSequence x = generate(SourceSpec::uniform(1 + r), n);
    for (std::size_t ri = 0; ri < rules.size(); ++ri) {
      const SelectionResult result = run_rule(rules[ri].rule, x);
      if (!result.selected.empty()) {
        biases[ri].push_back(bias(result.selected));
      }
    }
  }

  CrystalSummary summary;
  summary.n = n;
  summary.replicates = replicates;
  summary.low_power = replicates == 1;
  summary.stable = true;

  for (std::size_t ri = 0; ri < rules.size(); ++ri) {
    GroupStats g;
    g.rule_id = rules[ri].id;
    g.records_used = biases[ri].size();
    if (biases[ri].empty()) {
      g.excluded = true;
      summary.groups.push_back(g);
      continue;
    }
    double sum = 0;
    for (const double b : biases[ri]) sum += b;
    g.mean_bias = sum / static_cast<double>(biases[ri].size());
    if (biases[ri].size() >= 2) {
      double sq = 0;
      for (const double b : biases[ri]) {
        sq += (b - g.mean_bias) * (b - g.mean_bias);
      }
      const double variance = sq / static_cast<double>(biases[ri].size() - 1);
      g.std_err =
          std::sqrt(variance / static_cast<double>(biases[ri].size()));
    }
    summary.groups.push_back(g);
  }

  const GroupStats& crystal = summary.groups.front();
  summary.crystal_mean_bias = crystal.mean_bias;
  for (std::size_t ri = 1; ri < summary.groups.size(); ++ri) {
    const GroupStats& g = summary.groups[ri];
    if (g.excluded) continue;
    if (crystal.mean_bias > g.mean_bias + 3.0 * g.std_err) {
      summary.stable = false;
    }
  }
  return summary;
}

namespace {

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void emit_csv(std::span<const ExperimentRecord> records, std::ostream& out) {
  out << "rule_id,k_rule_bits,seed,sub_len,bias,delta_hat_bits,bound,"
         "satisfied,halt_reason\n";
  for (const ExperimentRecord& rec : records) {
    out << csv_escape(rec.rule_id) << ',' << rec.k_rule << ',' << rec.seed
        << ',' << rec.sub_len << ',';
    if (rec.bias) out << format_double(*rec.bias);
    out << ',' << format_double(rec.delta_hat) << ',';
    if (rec.bound) out << format_double(*rec.bound);
    out << ',';
    if (rec.satisfied) out << (*rec.satisfied ? "true" : "false");
    out << ',' << to_string(rec.halt_reason) << '\n';
  }
}

void emit_json(std::span<const ExperimentRecord> records, std::ostream& out) {
  nlohmann::ordered_json array = nlohmann::ordered_json::array();
  for (const ExperimentRecord& rec : records) {
    nlohmann::ordered_json obj;
    obj["rule_id"] = rec.rule_id;
    obj["k_rule_bits"] = rec.k_rule;
    obj["seed"] = rec.seed;
    obj["sub_len"] = rec.sub_len;
    obj["bias"] = rec.bias ? nlohmann::ordered_json(*rec.bias)
                           : nlohmann::ordered_json(nullptr);
    obj["delta_hat_bits"] = rec.delta_hat;
    obj["bound"] = rec.bound ? nlohmann::ordered_json(*rec.bound)
                             : nlohmann::ordered_json(nullptr);
    obj["satisfied"] = rec.satisfied ? nlohmann::ordered_json(*rec.satisfied)
                                     : nlohmann::ordered_json(nullptr);
    obj["halt_reason"] = std::string(to_string(rec.halt_reason));
    array.push_back(std::move(obj));
  }
  out << array.dump(2) << '\n';
}

}  // namespace

void emit(std::span<const ExperimentRecord> records, std::ostream& out,
          OutputFormat format) {
  switch (format) {
    case OutputFormat::kCsv:
      emit_csv(records, out);
      break;
    case OutputFormat::kJson:
      emit_json(records, out);
      break;
  }
  if (!out) throw IoError("write failed");
}

void emit(std::span<const ExperimentRecord> records,
          const std::filesystem::path& path, OutputFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  emit(records, out, format);
  out.close();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace rulelab
