#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "infind/config.hpp"
#include "infind/continuous_inference.hpp"
#include "infind/environments.hpp"
#include "infind/inference.hpp"
#include "infind/metrics.hpp"
#include "infind/planners.hpp"
#include "infind/posterior.hpp"
#include "infind/run_log.hpp"

namespace infind {

enum class Algorithm { kBbi, kPsrl, kMmbi, kMeanFieldBbi, kRandom };

Algorithm parse_algorithm(const std::string& id);
std::string algorithm_name(Algorithm algorithm);

enum class ReplanSchedule { kTriangular, kEvery };

struct ExperimentConfig {
  std::string environment = "nchain";
  std::string map_file;
  std::uint64_t matrix_seed = 1;
  Algorithm algorithm = Algorithm::kBbi;
  InductionConfig planner;
  double gamma = 0.99;
  double sigma_sq_factor = 1e-4;
  long steps = 10000;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  ReplanSchedule schedule = ReplanSchedule::kTriangular;
  long replan_interval = 1;
  double half_life = 1000.0;
  /// Greedy evaluation episodes at these training steps (continuous only).
  std::vector<long> eval_checkpoints;
  int eval_episodes = 5;
  long eval_max_steps = 3000;
  std::string output_dir;
  std::string output_prefix = "run";
  /// Worker threads; 0 selects the hardware concurrency.
  int threads = 0;

  /// Defaults for an environment: lookahead 100 (discrete) or 20
  /// (continuous); 20 value samples for the large grid worlds.
  static ExperimentConfig defaults_for(const std::string& environment);
  void validate() const;
};

/// Reads every known key; unknown keys are rejected.
ExperimentConfig experiment_config_from(const KeyValueConfig& kv);

/// True at t = 1, 3, 6, 10, ... (triangular) or every `interval` steps from 1.
bool is_replan_step(ReplanSchedule schedule, long interval, long t);

/// A learning agent on a tabular environment.
class DiscreteAgent {
 public:
  DiscreteAgent(const ExperimentConfig& config, int n_states, int n_actions, RewardRange rewards, Rng rng);

  void replan();
  int act(int state);
  void observe(const Observation& obs) { posterior_.update(obs); }

  const DirichletNormalGammaPosterior& posterior() const { return posterior_; }
  const std::optional<PlanOutput>& last_bbi_plan() const { return bbi_plan_; }
  LikelihoodScale& scale() { return scale_; }

 private:
  ExperimentConfig config_;
  DirichletNormalGammaPosterior posterior_;
  LikelihoodScale scale_;
  Rng rng_;
  StationaryPolicy policy_;
  std::optional<PlanOutput> bbi_plan_;
};

struct EpisodeRecord {
  std::uint64_t seed = 0;
  long episode = 0;
  long end_step = 0;
  long length = 0;
  double total_reward = 0.0;
};

struct EvaluationRecord {
  std::uint64_t seed = 0;
  long step = 0;
  double mean_length = 0.0;
  double mean_return = 0.0;
};

struct SeedResult {
  RunLog log;
  std::vector<Checkpoint> checkpoints;
  std::vector<EpisodeRecord> episodes;
  std::vector<EvaluationRecord> evaluations;
};

struct AggregatePoint {
  long step = 0;
  double mean = 0.0;
  double standard_error = 0.0;
};

struct ExperimentResult {
  std::vector<SeedResult> seeds;
  std::vector<AggregatePoint> aggregate;
};

SeedResult run_seed(const ExperimentConfig& config, std::uint64_t seed);
/// Runs every seed on a worker pool; results are ordered as config.seeds.
ExperimentResult run_experiment(const ExperimentConfig& config);
/// Pointwise mean and standard error of the smoothed curves.
std::vector<AggregatePoint> aggregate_curves(const std::vector<SeedResult>& seeds);

/// Writes <prefix>.csv (all seeds), <prefix>_seed<N>.csv, <prefix>_aggregate.csv
/// and, when present, episode and evaluation tables into config.output_dir.
void write_experiment_outputs(const ExperimentConfig& config, const ExperimentResult& result);
std::string experiment_csv(const ExperimentResult& result);

/// Mean episode length and return of a greedy fitted-Q policy (or a uniform
/// random policy when `plan` is null) over fresh episodes.
EvaluationRecord evaluate_continuous_policy(const std::string& environment, std::uint64_t env_seed,
                                            std::uint64_t matrix_seed, const ContinuousPlan* plan, int episodes,
                                            long max_steps, Rng& rng);

// ----------------------------------------------------------------- studies

struct PosteriorQualityConfig {
  std::vector<long> checkpoints{10, 100, 1000};
  int repetitions = 5;
  int truth_samples = 1000;
  int belief_samples = 1000;
  double first_action_prob = 0.8;
  double gamma = 0.99;
  double sigma_sq_factor = 1e-4;
  InductionConfig induction = [] {
    InductionConfig c;
    c.lookahead = 1000;
    return c;
  }();
  bool per_state = false;
  bool include_mean_field = false;
  std::uint64_t seed = 1;
};

struct PosteriorQualityRow {
  long step = 0;
  double induction = 0.0;
  std::vector<double> induction_runs;
  double mean_mdp = 0.0;
  double mean_field = 0.0;
};

/// Wasserstein distances between value-function beliefs and the Monte-Carlo
/// truth on NChain under a fixed stochastic policy.
std::vector<PosteriorQualityRow> posterior_quality_experiment(const PosteriorQualityConfig& config);
std::string posterior_quality_csv(const std::vector<PosteriorQualityRow>& rows, bool include_mean_field);

struct BayesBoundConfig {
  std::string environment = "nchain";
  std::string map_file;
  long steps = 10000;
  std::vector<long> checkpoints{100, 1000, 10000};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  int bound_samples = 100;
  double gamma = 0.99;
  double sigma_sq_factor = 1e-4;
  /// Planner used for the value estimate at each checkpoint.
  InductionConfig evaluation = [] {
    InductionConfig c;
    c.n_mdp_samples = 100;
    c.lookahead = 500;
    return c;
  }();
  /// Planner used to act between checkpoints.
  InductionConfig acting;
  int threads = 0;
};

struct BayesBoundRow {
  std::uint64_t seed = 0;
  long step = 0;
  double bbi_value = 0.0;
  double bound = 0.0;
  double bound_stderr = 0.0;
};

std::vector<BayesBoundRow> bayes_bound_experiment(const BayesBoundConfig& config);
std::string bayes_bound_csv(const std::vector<BayesBoundRow>& rows);

/// Calls fn(i) for i in [0, n) on `threads` workers (0 = hardware).
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace infind
