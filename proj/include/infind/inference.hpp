#pragma once

#include <span>
#include <vector>

#include "json.hpp"

#include "infind/mdp.hpp"
#include "infind/posterior.hpp"
#include "infind/random.hpp"

namespace infind {

/// Importance weighting of sampled MDPs, or the mean-field ablation that
/// fixes every weight to 1/N_M.
enum class WeightMode { kImportance, kMeanField };

/// How utility samples u are produced for a probe state.
///   kBootstrapValue:  u = r(s,pi) + gamma * sum_s' P(s'|s,pi) V(s'),  V ~ next belief
///   kExpectedUtility: u = r(s,pi) + gamma * sum_s' P(s'|s,pi) u_prev(s')
///   kSampledUtility:  u = r(s,a)  + gamma * u_prev(s'),  a ~ pi(s), s' ~ P(.|s,a)
enum class RolloutMode { kBootstrapValue, kExpectedUtility, kSampledUtility };

/// Hyperparameters shared by policy evaluation and the planners.
struct InductionConfig {
  int lookahead = 100;
  int n_mdp_samples = 10;
  int n_value_samples = 50;
  /// Next-step value draws (utility samples) per probe state.
  int n_next_value_samples = 10;
  WeightMode weight_mode = WeightMode::kImportance;
  RolloutMode rollout = RolloutMode::kBootstrapValue;
  RewardSampling reward_sampling = RewardSampling::kSampled;
  int max_sigma_doublings = 30;

  // Continuous state spaces only.
  double ridge_lambda = 0.01;
  int n_probe_states = 20;
  double history_fraction = 0.8;

  void validate() const;
};

/// Variance of the Gaussian likelihood linking a value sample to utilities.
/// Doubling is sticky until reset(), which callers invoke on new data.
class LikelihoodScale {
 public:
  explicit LikelihoodScale(double sigma_sq, double value_span = 0.0);
  /// sigma^2 = factor * V_span^2.
  static LikelihoodScale from_value_span(double value_span, double factor = 1e-4);

  double sigma_sq() const { return sigma_sq_; }
  double base_sigma_sq() const { return base_sigma_sq_; }
  double value_span() const { return value_span_; }
  int doublings() const { return doublings_; }

  /// Doubles sigma (sigma^2 grows fourfold).
  void double_sigma();
  void reset();

 private:
  double base_sigma_sq_;
  double sigma_sq_;
  double value_span_;
  int doublings_ = 0;
};

/// psi_i = N(mean, covariance) over state-value vectors.
struct ValueBeliefGaussian {
  Vector mean;
  Matrix covariance;

  static ValueBeliefGaussian point_mass(const Vector& value);
  int dim() const { return static_cast<int>(mean.size()); }

  nlohmann::json to_json() const;
  static ValueBeliefGaussian from_json(const nlohmann::json& doc);
};

/// Cached Cholesky factor of a belief for repeated draws. An exactly zero
/// covariance yields the mean itself.
class GaussianSampler {
 public:
  explicit GaussianSampler(const ValueBeliefGaussian& belief);

  Vector draw(Rng& rng) const;
  /// dim x n matrix of draws.
  Matrix draw(int n, Rng& rng) const;

 private:
  Vector mean_;
  Matrix lower_;
  bool degenerate_;
};

/// N_V draws from the belief via Cholesky of S + eps*I.
Matrix sample_belief(const ValueBeliefGaussian& belief, int n_samples, Rng& rng);

/// Utilities u^j_m for every sampled MDP j and probe m.
struct UtilitySampleSet {
  /// State of each probe m (probe states repeat once per utility draw).
  std::vector<int> probe_states;
  /// N_M x n.
  Matrix utilities;
};

/// Bootstrap utilities: for each probe state, `draws_per_probe` value vectors
/// V ~ next_belief and u = (B^pi_j V)(s).
UtilitySampleSet generate_utility_samples(std::span<const DiscreteMdp> mdps, const StationaryPolicy& policy,
                                          const GaussianSampler& next_belief, std::span<const int> probe_states,
                                          int draws_per_probe, Rng& rng);

/// Stateful utility source covering all rollout modes; probes are all states.
class UtilityGenerator {
 public:
  UtilityGenerator(RolloutMode mode, int n_states, int draws_per_state);

  /// Utilities for the next stage; the utility-bootstrapping modes reuse what
  /// the previous call produced (zero before the first call).
  UtilitySampleSet generate(std::span<const DiscreteMdp> mdps, const StationaryPolicy& policy,
                            const GaussianSampler& bootstrap_belief, Rng& rng);

 private:
  RolloutMode mode_;
  int n_states_;
  int draws_;
  std::vector<int> probes_;
  std::vector<Matrix> previous_;  // per MDP, n_states x draws
};

struct WeightResult {
  /// N_M x N_V; every column sums to one.
  Matrix weights;
  /// Some value sample had every raw likelihood term underflow.
  bool underflow = false;
};

/// w_jk proportional to sum_m exp(-(V^k(s_m) - u^j_m)^2 / (2 sigma^2)),
/// normalised over j for every k, evaluated with per-k max subtraction.
/// `probe_values` is n x N_V (V^k at every probe), `utilities` N_M x n.
WeightResult compute_weights(const Matrix& probe_values, const Matrix& utilities, double sigma_sq);
/// Same, with `value_samples` as n_states x N_V value vectors.
WeightResult compute_weights(const Matrix& value_samples, const UtilitySampleSet& utilities, double sigma_sq);

Matrix uniform_weights(int n_mdps, int n_values);

/// V_i^{(j,k)} = B^pi_{mdp_j} V^{(k)}; n_states x (N_M * N_V), column j*N_V + k.
Matrix propagate_values(std::span<const DiscreteMdp> mdps, const StationaryPolicy& policy, const Matrix& next_samples);

/// Propagated value samples with their importance weights.
struct WeightedValueEnsemble {
  Matrix values;   // n_states x (N_M * N_V), column j*N_V + k
  Matrix weights;  // N_M x N_V

  int n_mdps() const { return static_cast<int>(weights.rows()); }
  int n_values() const { return static_cast<int>(weights.cols()); }
  nlohmann::json to_json() const;
};

/// Weighted mean and covariance with weights w_jk / N_V (unit total mass).
ValueBeliefGaussian fit_gaussian_belief(const WeightedValueEnsemble& ensemble);

/// Plain Monte-Carlo value distribution: N_M sampled MDPs, each solved
/// exactly for `policy`. Returns n_states x N_M.
Matrix mc_value_distribution(const DirichletNormalGammaPosterior& posterior, const StationaryPolicy& policy,
                             int n_mdps, Rng& rng, RewardSampling rewards = RewardSampling::kSampled);

/// Draws value samples for one induction stage and weights them, applying the
/// resample-then-double-sigma fallback when the likelihood underflows.
struct StageDraw {
  Matrix values_next;  // n_states x N_V, drawn from the next-step belief
  Matrix weights;      // N_M x N_V
};

StageDraw draw_weighted_stage(std::span<const DiscreteMdp> mdps, const StationaryPolicy& utility_policy,
                              const GaussianSampler& next_belief, const GaussianSampler& bootstrap_belief,
                              UtilityGenerator& utilities, const InductionConfig& config, LikelihoodScale& scale,
                              Rng& rng);

/// Method-1 policy evaluation; returns psi_1 ... psi_T (psi_T is a point mass
/// at zero). MDPs are sampled from the posterior before anything else.
std::vector<ValueBeliefGaussian> policy_evaluation_method1(const DirichletNormalGammaPosterior& posterior,
                                                           const StationaryPolicy& policy,
                                                           const InductionConfig& config, LikelihoodScale& scale,
                                                           Rng& rng);
std::vector<ValueBeliefGaussian> policy_evaluation_method1(std::span<const DiscreteMdp> mdps,
                                                           const StationaryPolicy& policy,
                                                           const InductionConfig& config, LikelihoodScale& scale,
                                                           Rng& rng);

/// The same pipeline with all weights fixed to 1/N_M.
std::vector<ValueBeliefGaussian> mean_field_evaluation(const DirichletNormalGammaPosterior& posterior,
                                                       const StationaryPolicy& policy, const InductionConfig& config,
                                                       LikelihoodScale& scale, Rng& rng);

}  // namespace infind
