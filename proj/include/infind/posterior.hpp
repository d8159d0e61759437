#pragma once

#include <vector>

#include "json.hpp"

#include "infind/mdp.hpp"
#include "infind/random.hpp"

namespace infind {

/// Normal-Gamma belief over the (mean, precision) of a Gaussian reward.
struct NormalGamma {
  double mu = 0.0;
  double kappa = 1.0;
  double alpha = 1.0;
  double beta = 1.0;

  NormalGamma updated(double reward) const;
  /// Draws the mean from its marginal: tau ~ Gamma(alpha, beta), mu ~ N(mu, 1/(kappa tau)).
  double sample_mean(Rng& rng) const;
  /// Joint log density of (mean, precision).
  double log_density(double mean, double precision) const;

  friend bool operator==(const NormalGamma&, const NormalGamma&) = default;
};

struct Observation {
  int state = 0;
  int action = 0;
  double reward = 0.0;
  int next_state = 0;
};

/// Whether sampled MDPs carry sampled reward means or the posterior means.
enum class RewardSampling { kSampled, kPosteriorMean };

/// Dirichlet-product transitions and per-(s,a) Normal-Gamma rewards.
class DirichletNormalGammaPosterior {
 public:
  DirichletNormalGammaPosterior(int n_states, int n_actions, double discount, double alpha0 = 0.5,
                                NormalGamma reward_prior = {0.0, 1.0, 1.0, 1.0});

  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  double discount() const { return discount_; }

  void update(const Observation& obs);

  /// alpha[s][a][s'].
  double count(int state, int action, int next_state) const {
    return counts_[static_cast<std::size_t>(action)](state, next_state);
  }
  const Matrix& counts(int action) const { return counts_.at(static_cast<std::size_t>(action)); }
  const NormalGamma& reward_params(int state, int action) const {
    return rewards_[static_cast<std::size_t>(state * n_actions_ + action)];
  }
  /// Number of observations of (s, a).
  long visits(int state, int action) const { return visits_[static_cast<std::size_t>(state * n_actions_ + action)]; }
  long total_observations() const { return total_observations_; }

  DiscreteMdp sample_mdp(Rng& rng, RewardSampling rewards = RewardSampling::kSampled) const;
  std::vector<DiscreteMdp> sample_mdps(int count, Rng& rng, RewardSampling rewards = RewardSampling::kSampled) const;
  DiscreteMdp mean_mdp() const;

  /// Dirichlet log density of a transition row for (s, a).
  double transition_log_density(int state, int action, const Vector& row) const;

  nlohmann::json to_json() const;
  static DirichletNormalGammaPosterior from_json(const nlohmann::json& doc);

  friend bool operator==(const DirichletNormalGammaPosterior& a, const DirichletNormalGammaPosterior& b);

 private:
  int n_states_;
  int n_actions_;
  double discount_;
  std::vector<Matrix> counts_;
  std::vector<NormalGamma> rewards_;
  std::vector<long> visits_;
  long total_observations_ = 0;
};

/// log Gamma-function based Dirichlet log density.
double dirichlet_log_density(const Vector& alpha, const Vector& p);

/// Matrix-normal-inverse-Wishart parameters for Y = X B + E, rows of E ~ N(0, Sigma).
struct TransitionPosterior {
  Matrix mean;       // f x d coefficient mean
  Matrix precision;  // f x f row precision
  Matrix scale;      // d x d inverse-Wishart scale
  double dof = 0.0;
};

/// Normal-inverse-Gamma parameters for r = x^T beta + e, e ~ N(0, sigma^2).
struct RewardPosterior {
  Vector mean;
  Matrix precision;
  double shape = 0.5;
  double rate = 0.5;
};

/// One MDP drawn from a BayesLinRegPosterior.
struct LinearMdpSample {
  std::vector<Matrix> transition_coef;  // per action, f x d: s' = coef^T phi + noise
  std::vector<Matrix> noise_cov;        // per action, d x d
  std::vector<Matrix> noise_chol;       // lower Cholesky factors of noise_cov
  std::vector<Vector> reward_coef;      // per action, f
  std::vector<double> reward_noise_var;
  double discount = 0.99;

  int n_actions() const { return static_cast<int>(transition_coef.size()); }
  Vector mean_next(const Vector& phi, int action) const;
  Vector sample_next(const Vector& phi, int action, Rng& rng) const;
  double mean_reward(const Vector& phi, int action) const;
};

struct LinRegPrior {
  double coef_precision = 1e-3;
  double scale = 1e-3;
  /// Inverse-Wishart degrees of freedom; <= 0 selects the state dimension.
  double dof = 0.0;
  double reward_coef_precision = 1e-3;
  double noise_shape = 0.5;
  double noise_rate = 0.5;
};

/// Per-action Bayesian multivariate linear regression of next state and
/// reward on state features, kept as sufficient statistics.
class BayesLinRegPosterior {
 public:
  BayesLinRegPosterior(int feature_dim, int state_dim, int n_actions, double discount, LinRegPrior prior = {});

  int feature_dim() const { return feature_dim_; }
  int state_dim() const { return state_dim_; }
  int n_actions() const { return n_actions_; }
  double discount() const { return discount_; }
  const LinRegPrior& prior() const { return prior_; }

  void update(int action, const Vector& features, double reward, const Vector& next_state);

  TransitionPosterior transition_params(int action) const;
  RewardPosterior reward_params(int action) const;
  long observations(int action) const { return stats_.at(static_cast<std::size_t>(action)).count; }

  LinearMdpSample sample(Rng& rng, RewardSampling rewards = RewardSampling::kSampled) const;
  std::vector<LinearMdpSample> sample_mdps(int count, Rng& rng,
                                           RewardSampling rewards = RewardSampling::kSampled) const;

  nlohmann::json to_json() const;
  static BayesLinRegPosterior from_json(const nlohmann::json& doc);

 private:
  struct Stats {
    Matrix xtx;
    Matrix xty;
    Matrix yty;
    Vector xtr;
    double rtr = 0.0;
    long count = 0;
  };

  int feature_dim_;
  int state_dim_;
  int n_actions_;
  double discount_;
  LinRegPrior prior_;
  std::vector<Stats> stats_;
};

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& doc);

}  // namespace infind
