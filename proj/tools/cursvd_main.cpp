#include "cursvd/curated.hpp"
#include "cursvd/experiments.hpp"
#include "cursvd/lemma_checks.hpp"
#include "cursvd/matrix_io.hpp"
#include "cursvd/models.hpp"
#include "cursvd/types.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitChecksFailed = 2;

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out_path;
};

void add_common(CLI::App* cmd, CommonArgs* args, bool config_required) {
  auto* config = cmd->add_option("-c,--config", args->config_path,
                                 "experiment config file (key = value text or JSON)");
  if (config_required) config->required();
  cmd->add_option("-s,--seed", args->seed, "override the config seed");
  cmd->add_option("-o,--out", args->out_path, "output file (default: stdout for CSV)");
  cmd->add_option("-t,--threads", args->threads, "worker threads for independent trials");
}

cursvd::ExperimentSpec load_spec(const CommonArgs& args) {
  cursvd::ExperimentSpec spec;
  if (!args.config_path.empty()) spec = cursvd::load_experiment_spec(args.config_path);
  if (args.seed) {
    spec.cfg.seed = *args.seed;
    // A seed given on the command line also reseeds the model unless the
    // config pinned one explicitly via model_seed.
    spec.model.seed = *args.seed;
  }
  if (args.threads) spec.threads = *args.threads;
  if (!args.out_path.empty()) spec.output_path = args.out_path;
  return spec;
}

/// Writes CSV to the spec's output path, or stdout when none is set.
void deliver_csv(const std::string& path, const std::string& body) {
  if (path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << body;
  if (!out) throw std::runtime_error("failed while writing " + path);
}

int cmd_gen(const CommonArgs& args) {
  const cursvd::ExperimentSpec spec = load_spec(args);
  if (spec.output_path.empty()) throw std::runtime_error("gen needs --out for the matrix file");
  const cursvd::ModelMatrix model = cursvd::gen_model(spec.model);
  cursvd::write_matrix_file(spec.output_path, model);
  std::cerr << "wrote " << spec.output_path << " (k=" << model.k() << ", mass="
            << model.total_mass() << ")\n";
  return kExitOk;
}

int cmd_sample(const CommonArgs& args, const std::string& model_path) {
  const cursvd::ExperimentSpec spec = load_spec(args);
  if (spec.output_path.empty())
    throw std::runtime_error("sample needs --out for the observation file");
  std::optional<cursvd::ModelMatrix> model;
  int header_rank = spec.model.r;
  if (!model_path.empty()) {
    const cursvd::MatrixFileData data = cursvd::read_matrix_file(model_path);
    header_rank = data.r;
    model = cursvd::to_model_matrix(data);
  } else {
    model = cursvd::gen_model(spec.model);
  }
  const cursvd::Observation obs =
      cursvd::sample(*model, spec.cfg.seed, spec.sample_options);
  cursvd::write_matrix_file(spec.output_path, obs, header_rank);
  std::cerr << "wrote " << spec.output_path << " (k=" << obs.k() << ", mass="
            << obs.total_mass() << ")\n";
  return kExitOk;
}

int cmd_recover(const CommonArgs& args, const std::string& x_path, const std::string& model_path,
                const std::string& estimate_path) {
  if (x_path.empty()) throw std::runtime_error("recover needs --x with the observation file");
  const cursvd::MatrixFileData x_data = cursvd::read_matrix_file(x_path);
  const cursvd::Observation obs = cursvd::to_observation(x_data);

  cursvd::CuratedConfig cfg;
  if (!args.config_path.empty()) {
    cfg = cursvd::load_experiment_spec(args.config_path).cfg;
  } else {
    cfg.rank = x_data.r;
  }
  if (args.seed) cfg.seed = *args.seed;

  std::optional<cursvd::ModelMatrix> truth;
  if (!model_path.empty()) truth = cursvd::to_model_matrix(cursvd::read_matrix_file(model_path));

  const cursvd::RecoverReport report = cursvd::run_recover(obs, cfg, truth);
  if (!estimate_path.empty()) {
    cursvd::write_estimate_file(estimate_path, report.outcome.estimate, cfg.rank, obs.kind());
    std::cerr << "wrote " << estimate_path << "\n";
  }
  std::ostringstream csv;
  cursvd::write_recover_csv(csv, obs, cfg, report);
  deliver_csv(args.out_path, csv.str());
  return kExitOk;
}

int cmd_scaling(const CommonArgs& args) {
  const cursvd::ExperimentSpec spec = load_spec(args);
  const cursvd::ScalingResult result = cursvd::run_scaling(spec);
  std::ostringstream csv;
  cursvd::write_scaling_csv(csv, spec, result);
  deliver_csv(spec.output_path, csv.str());
  return kExitOk;
}

int cmd_counterexample(const CommonArgs& args) {
  const cursvd::ExperimentSpec spec = load_spec(args);
  const cursvd::CounterexampleResult result = cursvd::run_counterexample(spec);
  std::ostringstream csv;
  cursvd::write_counterexample_csv(csv, spec, result);
  deliver_csv(spec.output_path, csv.str());
  return kExitOk;
}

int cmd_lemmas(int instances, std::uint64_t seed, const std::string& suite) {
  std::vector<cursvd::LemmaCheckResult> results;
  if (suite.empty()) {
    results = cursvd::run_lemma_suites(instances, seed);
  } else {
    results.push_back(cursvd::run_lemma_suite(suite, instances, seed));
  }
  std::printf("%-26s %10s %9s %14s %11s %9s\n", "suite", "instances", "failures", "max_slack",
              "tolerance", "ms");
  bool all_passed = true;
  for (const auto& r : results) {
    std::printf("%-26s %10d %9d %14.4e %11.1e %9.1f\n", r.name.c_str(), r.instances, r.failures,
                r.max_slack, r.tolerance, r.runtime_ms);
    all_passed = all_passed && r.passed();
  }
  if (!all_passed) {
    std::printf("FAILED: at least one property suite reported violations\n");
    return kExitChecksFailed;
  }
  std::printf("all %zu suites passed\n", results.size());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curated low-rank recovery from sparse observations"};
  app.require_subcommand(1);

  CommonArgs gen_args;
  auto* gen = app.add_subcommand("gen", "generate a ground-truth matrix file");
  add_common(gen, &gen_args, /*config_required=*/true);

  CommonArgs sample_args;
  std::string sample_model_path;
  auto* sample = app.add_subcommand("sample", "draw one observation from a model");
  add_common(sample, &sample_args, /*config_required=*/false);
  sample->add_option("-m,--model", sample_model_path,
                     "matrix file to sample from (default: generate from config)");

  CommonArgs recover_args;
  std::string recover_x_path;
  std::string recover_model_path;
  std::string recover_estimate_path;
  auto* recover = app.add_subcommand("recover", "run the curated estimator on an observation");
  add_common(recover, &recover_args, /*config_required=*/false);
  recover->add_option("-x,--x", recover_x_path, "observation matrix file")->required();
  recover->add_option("-m,--model", recover_model_path,
                      "ground-truth matrix file (enables the error column)");
  recover->add_option("-e,--estimate", recover_estimate_path, "write the estimate here");

  CommonArgs scaling_args;
  auto* scaling = app.add_subcommand("scaling", "error-vs-mass study over a sampling grid");
  add_common(scaling, &scaling_args, /*config_required=*/true);

  CommonArgs counter_args;
  auto* counter = app.add_subcommand("counterexample",
                                     "adversarial block-diagonal lower-bound experiment");
  add_common(counter, &counter_args, /*config_required=*/true);

  int lemma_instances = 300;
  std::uint64_t lemma_seed = 7;
  std::string lemma_suite;
  auto* lemmas = app.add_subcommand("lemmas", "run the property-check suites");
  lemmas->add_option("-n,--instances", lemma_instances, "instances per suite");
  lemmas->add_option("-s,--seed", lemma_seed, "base seed");
  lemmas->add_option("--suite", lemma_suite, "run a single suite by name");

  try {
    app.parse(argc, argv);
    if (gen->parsed()) return cmd_gen(gen_args);
    if (sample->parsed()) return cmd_sample(sample_args, sample_model_path);
    if (recover->parsed())
      return cmd_recover(recover_args, recover_x_path, recover_model_path,
                         recover_estimate_path);
    if (scaling->parsed()) return cmd_scaling(scaling_args);
    if (counter->parsed()) return cmd_counterexample(counter_args);
    if (lemmas->parsed()) return cmd_lemmas(lemma_instances, lemma_seed, lemma_suite);
    return kExitError;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
