#include "cursvd/experiments.hpp"

#include "cursvd/matrix_io.hpp"
#include "cursvd/metrics.hpp"
#include "cursvd/oracles.hpp"
#include "cursvd/parallel.hpp"
#include "cursvd/regularization.hpp"
#include "cursvd/rng.hpp"
#include "cursvd/spectral.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cursvd {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::string normalized = value;
  std::replace(normalized.begin(), normalized.end(), ',', ' ');
  std::istringstream in(normalized);
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

/// Key-value view of a config, fed from either the flat text format or JSON.
class ConfigMap {
 public:
  ConfigMap(std::map<std::string, std::string> values, std::string name)
      : values_(std::move(values)), name_(std::move(name)) {}

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    consumed_.insert(key);
    return it->second;
  }

  double get_double(const std::string& key, double fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    consumed_.insert(key);
    return parse_double(key, it->second);
  }

  int get_int(const std::string& key, int fallback) {
    const double v = get_double(key, static_cast<double>(fallback));
    if (v != std::floor(v)) fail(key, "expected an integer");
    return static_cast<int>(v);
  }

  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    consumed_.insert(key);
    std::uint64_t out = 0;
    const char* begin = it->second.data();
    const char* end = begin + it->second.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end) fail(key, "expected an unsigned integer seed");
    return out;
  }

  bool get_bool(const std::string& key, bool fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    consumed_.insert(key);
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    fail(key, "expected true or false");
  }

  std::vector<double> get_double_list(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return {};
    consumed_.insert(key);
    std::vector<double> out;
    for (const auto& tok : split_list(it->second)) out.push_back(parse_double(key, tok));
    return out;
  }

  std::vector<std::string> get_string_list(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return {};
    consumed_.insert(key);
    return split_list(it->second);
  }

  void reject_unconsumed() const {
    for (const auto& [key, value] : values_) {
      if (!consumed_.count(key))
        throw std::runtime_error(name_ + ": unknown config key '" + key + "'");
    }
  }

 private:
  double parse_double(const std::string& key, const std::string& raw) {
    double out = 0.0;
    const char* begin = raw.data();
    const char* end = begin + raw.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end) fail(key, "cannot parse number '" + raw + "'");
    return out;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& reason) const {
    throw std::runtime_error(name_ + ": key '" + key + "': " + reason);
  }

  std::map<std::string, std::string> values_;
  std::string name_;
  std::set<std::string> consumed_;
};

std::map<std::string, std::string> parse_flat_config(const std::string& text,
                                                     const std::string& name) {
  std::map<std::string, std::string> values;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find_first_of("#;");
    std::string body = trim(comment == std::string::npos ? line : line.substr(0, comment));
    if (body.empty()) continue;
    if (body.front() == '[' && body.back() == ']') continue;  // section headers are cosmetic
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << name << ":" << line_no << ": expected 'key = value'";
      throw std::runtime_error(msg.str());
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) {
      std::ostringstream msg;
      msg << name << ":" << line_no << ": empty key";
      throw std::runtime_error(msg.str());
    }
    if (values.count(key)) {
      std::ostringstream msg;
      msg << name << ":" << line_no << ": duplicate key '" << key << "'";
      throw std::runtime_error(msg.str());
    }
    values[key] = value;
  }
  return values;
}

std::map<std::string, std::string> parse_json_config(const std::string& text,
                                                     const std::string& name) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(name + ": " + e.what());
  }
  if (!doc.is_object()) throw std::runtime_error(name + ": config JSON must be an object");
  auto scalar_to_string = [&](const nlohmann::json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number_float()) return format_double(v.get<double>());
    throw std::runtime_error(name + ": unsupported JSON value type");
  };
  std::map<std::string, std::string> values;
  for (const auto& [key, value] : doc.items()) {
    if (value.is_array()) {
      std::string joined;
      for (const auto& item : value) {
        if (!joined.empty()) joined += ' ';
        joined += scalar_to_string(item);
      }
      values[key] = joined;
    } else {
      values[key] = scalar_to_string(value);
    }
  }
  return values;
}

ModelShape parse_shape(const std::string& name) {
  if (name == "random_factors") return ModelShape::kRandomFactors;
  if (name == "sbm") return ModelShape::kSbm;
  if (name == "heavy_rows") return ModelShape::kHeavyRows;
  if (name == "counterexample") return ModelShape::kCounterexample;
  throw std::runtime_error("unknown model shape '" + name + "'");
}

std::string shape_name(ModelShape shape) {
  switch (shape) {
    case ModelShape::kRandomFactors: return "random_factors";
    case ModelShape::kSbm: return "sbm";
    case ModelShape::kHeavyRows: return "heavy_rows";
    case ModelShape::kCounterexample: return "counterexample";
  }
  return "?";
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

/// CSV cell helpers: every number goes through shortest round-trip formatting.
std::string cell(double v) { return format_double(v); }
std::string cell(int v) { return std::to_string(v); }
std::string cell(std::uint64_t v) { return std::to_string(v); }
std::string cell(bool v) { return v ? "1" : "0"; }
std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

Eigen::MatrixXd baseline_estimate(Baseline baseline, const Observation& obs,
                                  const CuratedConfig& cfg) {
  const int k = obs.k();
  SvdOptions options;
  options.dense_threshold = cfg.svd_dense_threshold;
  options.seed = derive_seed({cfg.seed, 0x626173656c696e65ULL});
  switch (baseline) {
    case Baseline::kPlainRankR:
      return truncated_svd(obs.dense_entries(), std::min(cfg.rank, k), options).reconstruction();
    case Baseline::kPlainRank2R:
      return truncated_svd(obs.dense_entries(), std::min(2 * cfg.rank, k), options)
          .reconstruction();
    case Baseline::kRwSvdNoDeletion: {
      const RegWeights w = compute_weights(obs, n_avg(obs, cfg));
      return rw_svd(obs.dense_entries(), std::min(2 * cfg.rank, k), w, options);
    }
  }
  throw std::logic_error("unhandled baseline");
}

}  // namespace

std::string baseline_name(Baseline b) {
  switch (b) {
    case Baseline::kPlainRankR: return "plain_r_svd";
    case Baseline::kPlainRank2R: return "plain_2r_svd";
    case Baseline::kRwSvdNoDeletion: return "rw_svd_no_deletion";
  }
  return "?";
}

Baseline parse_baseline(const std::string& name) {
  if (name == "plain_r_svd") return Baseline::kPlainRankR;
  if (name == "plain_2r_svd") return Baseline::kPlainRank2R;
  if (name == "rw_svd_no_deletion") return Baseline::kRwSvdNoDeletion;
  throw std::runtime_error("unknown baseline '" + name + "'");
}

ExperimentSpec parse_experiment_spec(const std::string& text, const std::string& name) {
  const auto first = text.find_first_not_of(" \t\r\n");
  const bool json = first != std::string::npos && text[first] == '{';
  ConfigMap config(json ? parse_json_config(text, name) : parse_flat_config(text, name), name);

  ExperimentSpec spec;
  spec.cfg.seed = config.get_seed("seed", 0);
  spec.model.shape = parse_shape(config.get_string("model", "random_factors"));
  const std::string kind = config.get_string("kind", "poisson");
  std::optional<double> kind_param;
  if (config.has("kind_param")) kind_param = config.get_double("kind_param", 0.0);
  spec.model.kind = ModelKind::parse(kind, kind_param);
  spec.model.k = config.get_int("k", 0);
  spec.model.r = config.get_int("r", 1);
  const double default_mass = spec.model.kind.family() == ModelFamily::kDistribution
                                  ? static_cast<double>(spec.model.kind.draws())
                                  : 0.0;
  spec.model.target_mass = config.get_double("target_mass", default_mass);
  spec.model.seed = config.get_seed("model_seed", spec.cfg.seed);
  spec.model.sbm_p_in = config.get_double("sbm_p_in", spec.model.sbm_p_in);
  spec.model.sbm_p_out = config.get_double("sbm_p_out", spec.model.sbm_p_out);
  spec.model.heavy_count = config.get_int("heavy_count", spec.model.heavy_count);
  spec.model.heavy_boost = config.get_double("heavy_boost", spec.model.heavy_boost);
  spec.model.n_max = config.get_int("n_max", spec.model.n_max);

  const std::string noise = config.get_string("collab_noise", "uniform");
  if (noise == "uniform") {
    spec.sample_options.collab_noise = CollabNoise::kUniform;
  } else if (noise == "bernoulli") {
    spec.sample_options.collab_noise = CollabNoise::kBernoulli;
  } else {
    throw std::runtime_error(name + ": unknown collab_noise '" + noise + "'");
  }
  spec.sample_options.exact_multinomial = config.get_bool("exact_multinomial", false);

  spec.cfg.rank = config.get_int("rank", spec.model.r);
  spec.cfg.c_tau = config.get_double("c_tau", spec.cfg.c_tau);
  spec.cfg.c_w = config.get_double("c_w", spec.cfg.c_w);
  if (config.has("restarts")) spec.cfg.restarts = config.get_int("restarts", 0);
  if (config.has("n_total_override"))
    spec.cfg.n_total_override = config.get_double("n_total_override", 0.0);
  spec.cfg.svd_dense_threshold =
      config.get_int("svd_dense_threshold", spec.cfg.svd_dense_threshold);

  spec.trials = config.get_int("trials", 1);
  spec.mass_grid = config.get_double_list("mass_grid");
  for (const auto& token : config.get_string_list("baselines"))
    spec.baselines.push_back(parse_baseline(token));
  spec.threads = config.get_int("threads", 1);
  spec.output_path = config.get_string("out", "");

  config.reject_unconsumed();

  if (spec.trials < 1) throw std::runtime_error(name + ": trials must be positive");
  if (spec.threads < 1) throw std::runtime_error(name + ": threads must be positive");
  for (std::size_t i = 1; i < spec.mass_grid.size(); ++i) {
    if (!(spec.mass_grid[i] > spec.mass_grid[i - 1]))
      throw std::runtime_error(name + ": mass_grid must be strictly increasing");
  }
  return spec;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_spec(buffer.str(), path.string());
}

ScalingResult run_scaling(const ExperimentSpec& spec) {
  std::vector<double> masses = spec.mass_grid;
  if (masses.empty()) masses.push_back(spec.model.target_mass);

  std::vector<ModelMatrix> models;
  models.reserve(masses.size());
  for (double mass : masses) {
    ModelSpec model_spec = spec.model;
    model_spec.target_mass = mass;
    if (model_spec.kind.family() == ModelFamily::kDistribution)
      model_spec.kind = ModelKind::distribution(static_cast<std::int64_t>(std::llround(mass)));
    models.push_back(gen_model(model_spec));
  }

  const int total = static_cast<int>(masses.size()) * spec.trials;
  ScalingResult result;
  result.trials.resize(total);

  parallel_for(total, spec.threads, [&](int index) {
    const int mass_index = index / spec.trials;
    const int trial = index % spec.trials;
    const ModelMatrix& model = models[mass_index];

    TrialRecord rec;
    rec.mass_index = mass_index;
    rec.mass = masses[mass_index];
    rec.trial = trial;
    rec.seed = derive_seed({spec.cfg.seed, static_cast<std::uint64_t>(mass_index),
                            static_cast<std::uint64_t>(trial)});

    const Observation obs = sample(model, rec.seed, spec.sample_options);
    rec.x_mass = obs.total_mass();

    CuratedConfig cfg = spec.cfg;
    cfg.seed = rec.seed;

    const auto start = Clock::now();
    const CuratedOutcome outcome = curated_svd(obs, cfg);
    rec.runtime_ms = elapsed_ms(start);

    rec.n_avg_estimate = obs.total_mass() > 0.0 ? n_avg(obs, cfg) : 0.0;
    rec.error = normalized_l1(model, outcome.estimate);
    rec.noise_norm = spectral_norm(obs.dense_entries() - model.dense_entries());
    rec.zeroed_rows = static_cast<int>(outcome.zeroed_rows.size());
    rec.zeroed_weight = outcome.zeroed_weight;
    rec.iterations = outcome.iterations;
    rec.restart_index = outcome.restart_index;

    const CertificateReport cert = objective_certificates(obs, cfg, outcome);
    rec.greedy_impact_max = cert.max_greedy_impact;
    rec.impact_cutoff = cert.thresholds.impact_cutoff;
    rec.knapsack_capacity = cert.thresholds.w_cn;
    rec.surviving_rows = static_cast<int>(cert.candidate_rows.size());
    rec.certificate_ok =
        cert.max_greedy_impact <= cert.thresholds.impact_cutoff * (1.0 + 1e-9) + 1e-9;
    if (!cert.candidate_weights.empty() && cert.candidate_weights.size() <= 15) {
      double worst = 0.0;
      for (const auto& component : cert.components) {
        worst = std::max(worst, brute_knapsack(component.candidate_values,
                                               cert.candidate_weights,
                                               cert.thresholds.w_cn)
                                    .second);
      }
      rec.brute_impact_max = worst;
    }

    if (model.kind().family() == ModelFamily::kCollab) {
      const double p = model.kind().observe_prob();
      const Eigen::MatrixXd f_true = model.dense_entries() / p;
      const EvalReport ratings = collab_eval(f_true, outcome.estimate, p);
      rec.rating_l1 = ratings.normalized_l1;
      rec.rating_mse = ratings.mse;
    }

    for (Baseline baseline : spec.baselines) {
      rec.baseline_errors.push_back(
          normalized_l1(model, baseline_estimate(baseline, obs, cfg)));
    }

    result.trials[index] = std::move(rec);
  });

  for (std::size_t mi = 0; mi < masses.size(); ++mi) {
    MassSummary summary;
    summary.mass = masses[mi];
    std::vector<double> errors;
    for (int t = 0; t < spec.trials; ++t)
      errors.push_back(result.trials[mi * spec.trials + t].error);
    summary.median_error = median(errors);
    for (std::size_t b = 0; b < spec.baselines.size(); ++b) {
      std::vector<double> baseline_errors;
      for (int t = 0; t < spec.trials; ++t)
        baseline_errors.push_back(result.trials[mi * spec.trials + t].baseline_errors[b]);
      summary.baseline_median_errors.push_back(median(baseline_errors));
    }
    result.summaries.push_back(std::move(summary));
  }

  if (masses.size() >= 4) {
    std::vector<std::pair<double, double>> points;  // (log mass, log median error)
    for (const auto& summary : result.summaries) {
      if (summary.median_error > 0.0 && summary.median_error < 0.9)
        points.emplace_back(std::log(summary.mass), std::log(summary.median_error));
    }
    if (points.size() >= 2) {
      double sx = 0.0;
      double sy = 0.0;
      double sxx = 0.0;
      double sxy = 0.0;
      for (const auto& [x, y] : points) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      const double n = static_cast<double>(points.size());
      result.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
  }
  return result;
}

int count_zero_blocks(const Observation& obs, int n_max) {
  if (n_max < 1) throw std::invalid_argument("n_max must be positive");
  const int side = 2 * n_max;
  if (obs.k() % side != 0)
    throw std::invalid_argument("2*n_max must divide the observation size");
  const int blocks = obs.k() / side;
  std::vector<int> support(blocks, 0);
  if (obs.is_dense()) {
    const auto& d = obs.dense_entries();
    for (int j = 0; j < obs.k(); ++j) {
      for (int i = 0; i < obs.k(); ++i) {
        if (d(i, j) != 0.0) ++support[i / side];
      }
    }
  } else {
    const auto& s = obs.sparse_entries();
    for (int outer = 0; outer < s.outerSize(); ++outer) {
      for (SparseMatrix::InnerIterator it(s, outer); it; ++it) {
        if (it.value() != 0.0) ++support[it.row() / side];
      }
    }
  }
  return static_cast<int>(std::count(support.begin(), support.end(), 0));
}

CounterexampleResult run_counterexample(const ExperimentSpec& spec) {
  if (spec.model.shape != ModelShape::kCounterexample)
    throw std::runtime_error("the adversarial experiment needs model = counterexample");
  ModelSpec model_spec = spec.model;
  const ModelMatrix model = gen_model(model_spec);
  const int side = 2 * model_spec.n_max;

  CounterexampleResult result;
  result.blocks = model.k() / side;
  result.trials.resize(spec.trials);

  parallel_for(spec.trials, spec.threads, [&](int trial) {
    CounterexampleTrial rec;
    rec.trial = trial;
    rec.seed = derive_seed({spec.cfg.seed, 0, static_cast<std::uint64_t>(trial)});
    const auto start = Clock::now();
    const Observation obs = sample(model, rec.seed);
    rec.zero_block_count = count_zero_blocks(obs, model_spec.n_max);
    rec.zero_block_found = rec.zero_block_count > 0;
    rec.certified_lower_bound = rec.zero_block_found ? static_cast<double>(model_spec.n_max) : 0.0;
    rec.runtime_ms = elapsed_ms(start);
    result.trials[trial] = rec;
  });

  int found = 0;
  for (const auto& t : result.trials) found += t.zero_block_found ? 1 : 0;
  result.empirical_probability = static_cast<double>(found) / spec.trials;
  return result;
}

void write_scaling_csv(std::ostream& out, const ExperimentSpec& spec,
                       const ScalingResult& result) {
  const bool collab = spec.model.kind.family() == ModelFamily::kCollab;
  out << "row,mass,trial,seed,k,r,model,kind,x_mass,n_avg_estimate,error,noise_norm,"
         "zeroed_rows,zeroed_weight,iterations,restart_index,runtime_ms,greedy_impact_max,"
         "impact_cutoff,knapsack_capacity,surviving_rows,certificate_ok,brute_impact_max";
  if (collab) out << ",rating_l1,rating_mse";
  for (Baseline b : spec.baselines) out << ",baseline:" << baseline_name(b);
  out << '\n';

  const std::string model = shape_name(spec.model.shape);
  std::string kind = spec.model.kind.token();
  std::replace(kind.begin(), kind.end(), ' ', ':');

  for (const auto& rec : result.trials) {
    out << "trial," << cell(rec.mass) << ',' << cell(rec.trial) << ',' << cell(rec.seed) << ','
        << cell(spec.model.k) << ',' << cell(spec.model.r) << ',' << model << ',' << kind << ','
        << cell(rec.x_mass) << ',' << cell(rec.n_avg_estimate) << ',' << cell(rec.error) << ','
        << cell(rec.noise_norm) << ',' << cell(rec.zeroed_rows) << ',' << cell(rec.zeroed_weight)
        << ',' << cell(rec.iterations) << ',' << cell(rec.restart_index) << ','
        << cell(rec.runtime_ms) << ',' << cell(rec.greedy_impact_max) << ','
        << cell(rec.impact_cutoff) << ',' << cell(rec.knapsack_capacity) << ','
        << cell(rec.surviving_rows) << ',' << cell(rec.certificate_ok) << ','
        << cell(rec.brute_impact_max);
    if (collab) out << ',' << cell(rec.rating_l1) << ',' << cell(rec.rating_mse);
    for (double e : rec.baseline_errors) out << ',' << cell(e);
    out << '\n';
  }

  for (const auto& summary : result.summaries) {
    out << "median," << cell(summary.mass) << ",,," << cell(spec.model.k) << ','
        << cell(spec.model.r) << ',' << model << ',' << kind << ",,," << cell(summary.median_error)
        << ",,,,,,,,,,,,";
    if (collab) out << ",,";
    for (double e : summary.baseline_median_errors) out << ',' << cell(e);
    out << '\n';
  }

  if (result.slope) {
    out << "slope,,,," << cell(spec.model.k) << ',' << cell(spec.model.r) << ',' << model << ','
        << kind << ",,," << cell(*result.slope) << ",,,,,,,,,,,,";
    if (collab) out << ",,";
    for (std::size_t b = 0; b < spec.baselines.size(); ++b) out << ',';
    out << '\n';
  }
}

void write_counterexample_csv(std::ostream& out, const ExperimentSpec& spec,
                              const CounterexampleResult& result) {
  out << "row,trial,seed,k,n_max,blocks,zero_block_found,zero_block_count,"
         "certified_lower_bound,runtime_ms,empirical_probability\n";
  for (const auto& rec : result.trials) {
    out << "trial," << cell(rec.trial) << ',' << cell(rec.seed) << ',' << cell(spec.model.k)
        << ',' << cell(spec.model.n_max) << ',' << cell(result.blocks) << ','
        << cell(rec.zero_block_found) << ',' << cell(rec.zero_block_count) << ','
        << cell(rec.certified_lower_bound) << ',' << cell(rec.runtime_ms) << ",\n";
  }
  out << "summary,,," << cell(spec.model.k) << ',' << cell(spec.model.n_max) << ','
      << cell(result.blocks) << ",,,,," << cell(result.empirical_probability) << '\n';
}

RecoverReport run_recover(const Observation& obs, const CuratedConfig& cfg,
                          const std::optional<ModelMatrix>& truth) {
  RecoverReport report;
  const auto start = Clock::now();
  report.outcome = curated_svd(obs, cfg);
  report.runtime_ms = elapsed_ms(start);
  if (truth.has_value()) {
    if (truth->k() != obs.k())
      throw std::runtime_error("truth matrix size does not match the observation");
    report.error = normalized_l1(*truth, report.outcome.estimate);
  }
  return report;
}

void write_recover_csv(std::ostream& out, const Observation& obs, const CuratedConfig& cfg,
                       const RecoverReport& report) {
  std::string kind = obs.kind().token();
  std::replace(kind.begin(), kind.end(), ' ', ':');
  out << "k,r,kind,x_mass,error,zeroed_rows,zeroed_weight,restarts,runtime_ms\n";
  out << cell(obs.k()) << ',' << cell(cfg.rank) << ',' << kind << ',' << cell(obs.total_mass())
      << ',' << cell(report.error) << ',' << cell(static_cast<int>(report.outcome.zeroed_rows.size()))
      << ',' << cell(report.outcome.zeroed_weight) << ',' << cell(effective_restarts(cfg, obs.k()))
      << ',' << cell(report.runtime_ms) << '\n';
}

}  // namespace cursvd
