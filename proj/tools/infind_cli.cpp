#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "infind/config.hpp"
#include "infind/experiment.hpp"
#include "infind/metrics.hpp"
#include "infind/run_log.hpp"

namespace {

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

int run_command(const std::string& config_path, const std::vector<std::string>& overrides) {
  infind::KeyValueConfig kv = infind::KeyValueConfig::load(config_path);
  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw infind::ConfigError("--set expects key=value, got '" + item + "'");
    kv.set(item.substr(0, eq), item.substr(eq + 1));
  }
  const infind::ExperimentConfig config = infind::experiment_config_from(kv);
  const infind::ExperimentResult result = infind::run_experiment(config);
  infind::write_experiment_outputs(config, result);
  const infind::AggregatePoint& last = result.aggregate.back();
  std::cout << config.environment << ' ' << infind::algorithm_name(config.algorithm) << " step " << last.step
            << " smoothed reward " << infind::format_real(last.mean) << " +- "
            << infind::format_real(last.standard_error) << '\n';
  for (const infind::SeedResult& s : result.seeds) {
    for (const infind::EvaluationRecord& e : s.evaluations) {
      std::cout << "seed " << e.seed << " step " << e.step << " eval length " << infind::format_real(e.mean_length)
                << " return " << infind::format_real(e.mean_return) << '\n';
    }
  }
  return 0;
}

int smooth_command(const std::string& input, double half_life, const std::string& output) {
  std::ifstream in(input);
  if (!in) throw std::runtime_error("cannot open '" + input + "'");
  std::vector<infind::Checkpoint> rows = infind::read_checkpoints_csv(in);
  std::map<std::uint64_t, infind::ExpSmoother> smoothers;
  for (infind::Checkpoint& row : rows) {
    auto it = smoothers.try_emplace(row.seed, half_life).first;
    row.smoothed_reward = it->second.push(row.reward);
  }
  std::ostringstream out;
  infind::write_checkpoints_csv(out, rows);
  emit(out.str(), output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inferential induction experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  CLI::App* run = app.add_subcommand("run", "Run an experiment described by a key=value config file");
  run->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--set", overrides, "Override a config key (key=value)");

  const std::map<std::string, infind::RolloutMode> rollout_modes{
      {"bootstrap", infind::RolloutMode::kBootstrapValue},
      {"expected", infind::RolloutMode::kExpectedUtility},
      {"sampled", infind::RolloutMode::kSampledUtility}};
  infind::PosteriorQualityConfig pq;
  std::string pq_output;
  CLI::App* pe = app.add_subcommand("posterior-eval", "Wasserstein study of value-function beliefs on NChain");
  pe->add_option("--seed", pq.seed, "Data seed");
  pe->add_option("--checkpoints", pq.checkpoints, "Observation counts")->delimiter(',');
  pe->add_option("--repetitions", pq.repetitions, "Belief runs per checkpoint");
  pe->add_option("--truth-samples", pq.truth_samples, "Monte-Carlo truth samples");
  pe->add_option("--belief-samples", pq.belief_samples, "Draws from each fitted belief");
  pe->add_option("--lookahead", pq.induction.lookahead, "Induction horizon");
  pe->add_option("--n-mdp-samples", pq.induction.n_mdp_samples, "MDP samples per belief");
  pe->add_option("--n-value-samples", pq.induction.n_value_samples, "Value samples per stage");
  pe->add_option("--sigma-sq-factor", pq.sigma_sq_factor, "Likelihood variance factor");
  pe->add_option("--rollout", pq.induction.rollout, "Utility rollout: bootstrap, expected or sampled")
      ->transform(CLI::CheckedTransformer(rollout_modes, CLI::ignore_case));
  pe->add_flag("--per-state", pq.per_state, "Average W1 over all states instead of the start state");
  pe->add_flag("--mean-field", pq.include_mean_field, "Add the mean-field column");
  pe->add_option("-o,--output", pq_output, "Output CSV (default stdout)");

  infind::BayesBoundConfig bb;
  std::string bb_output;
  CLI::App* bound = app.add_subcommand("bayes-bound", "BBI value against the Monte-Carlo Bayes upper bound");
  bound->add_option("--env", bb.environment, "Discrete environment id");
  bound->add_option("--steps", bb.steps, "Interaction steps");
  bound->add_option("--checkpoints", bb.checkpoints, "Steps at which to evaluate")->delimiter(',');
  bound->add_option("--seeds", bb.seeds, "Seeds")->delimiter(',');
  bound->add_option("--bound-samples", bb.bound_samples, "MDP samples for the bound");
  bound->add_option("--lookahead", bb.evaluation.lookahead, "Evaluation horizon");
  bound->add_option("--threads", bb.threads, "Worker threads (0 = all cores)");
  bound->add_option("-o,--output", bb_output, "Output CSV (default stdout)");

  std::string smooth_input;
  std::string smooth_output;
  double half_life = 1000.0;
  CLI::App* smooth = app.add_subcommand("smooth", "Recompute smoothed rewards of a run CSV");
  smooth->add_option("input", smooth_input, "Run CSV")->required()->check(CLI::ExistingFile);
  smooth->add_option("--half-life", half_life, "Smoothing half-life")->check(CLI::PositiveNumber);
  smooth->add_option("-o,--output", smooth_output, "Output CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(config_path, overrides);
    if (*pe) {
      const auto rows = infind::posterior_quality_experiment(pq);
      emit(infind::posterior_quality_csv(rows, pq.include_mean_field), pq_output);
      return 0;
    }
    if (*bound) {
      emit(infind::bayes_bound_csv(infind::bayes_bound_experiment(bb)), bb_output);
      return 0;
    }
    if (*smooth) return smooth_command(smooth_input, half_life, smooth_output);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
