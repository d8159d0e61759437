#include "infind/inference.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace infind {

namespace {

// exp() of anything below this is a subnormal or zero in double precision.
constexpr double kUnderflowExponent = -708.0;

}  // namespace

void InductionConfig::validate() const {
  if (lookahead < 1) throw std::invalid_argument("lookahead must be at least 1");
  if (n_mdp_samples < 1) throw std::invalid_argument("n_mdp_samples must be at least 1");
  if (n_value_samples < 1) throw std::invalid_argument("n_value_samples must be at least 1");
  if (n_next_value_samples < 1) throw std::invalid_argument("n_next_value_samples must be at least 1");
  if (max_sigma_doublings < 0) throw std::invalid_argument("max_sigma_doublings must be non-negative");
  if (!(ridge_lambda >= 0.0)) throw std::invalid_argument("ridge_lambda must be non-negative");
  if (n_probe_states < 1) throw std::invalid_argument("n_probe_states must be at least 1");
  if (!(history_fraction >= 0.0 && history_fraction <= 1.0)) {
    throw std::invalid_argument("history_fraction must lie in [0, 1]");
  }
}

LikelihoodScale::LikelihoodScale(double sigma_sq, double value_span)
    : base_sigma_sq_(sigma_sq), sigma_sq_(sigma_sq), value_span_(value_span) {
  if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq)) {
    throw std::invalid_argument("likelihood variance must be positive and finite");
  }
}

LikelihoodScale LikelihoodScale::from_value_span(double value_span, double factor) {
  if (!(value_span > 0.0) || !(factor > 0.0)) {
    throw std::invalid_argument("value span and variance factor must be positive");
  }
  return LikelihoodScale(factor * value_span * value_span, value_span);
}

void LikelihoodScale::double_sigma() {
  sigma_sq_ *= 4.0;
  ++doublings_;
}

void LikelihoodScale::reset() {
  sigma_sq_ = base_sigma_sq_;
  doublings_ = 0;
}

ValueBeliefGaussian ValueBeliefGaussian::point_mass(const Vector& value) {
  return {value, Matrix::Zero(value.size(), value.size())};
}

nlohmann::json ValueBeliefGaussian::to_json() const {
  return {{"mean", matrix_to_json(mean)}, {"covariance", matrix_to_json(covariance)}};
}

ValueBeliefGaussian ValueBeliefGaussian::from_json(const nlohmann::json& doc) {
  Matrix mean = matrix_from_json(doc.at("mean"));
  ValueBeliefGaussian out;
  out.mean = mean.col(0);
  out.covariance = matrix_from_json(doc.at("covariance"));
  if (out.covariance.rows() != out.mean.size() || out.covariance.cols() != out.mean.size()) {
    throw std::invalid_argument("belief covariance does not match mean dimension");
  }
  return out;
}

GaussianSampler::GaussianSampler(const ValueBeliefGaussian& belief)
    : mean_(belief.mean), degenerate_(belief.covariance.isZero(0.0)) {
  if (belief.covariance.rows() != belief.mean.size() || belief.covariance.cols() != belief.mean.size()) {
    throw std::invalid_argument("belief covariance does not match mean dimension");
  }
  if (!degenerate_) lower_ = cholesky_with_jitter(belief.covariance);
}

Vector GaussianSampler::draw(Rng& rng) const {
  if (degenerate_) return mean_;
  return mean_ + lower_ * standard_normal(mean_.size(), rng);
}

Matrix GaussianSampler::draw(int n, Rng& rng) const {
  if (degenerate_) return mean_.replicate(1, n);
  Matrix out = lower_ * standard_normal(mean_.size(), n, rng);
  out.colwise() += mean_;
  return out;
}

Matrix sample_belief(const ValueBeliefGaussian& belief, int n_samples, Rng& rng) {
  return GaussianSampler(belief).draw(n_samples, rng);
}

UtilitySampleSet generate_utility_samples(std::span<const DiscreteMdp> mdps, const StationaryPolicy& policy,
                                          const GaussianSampler& next_belief, std::span<const int> probe_states,
                                          int draws_per_probe, Rng& rng) {
  if (mdps.empty()) throw std::invalid_argument("no MDP samples");
  const int n_probe = static_cast<int>(probe_states.size());
  const int n = n_probe * draws_per_probe;
  UtilitySampleSet out;
  out.probe_states.reserve(static_cast<std::size_t>(n));
  for (int d = 0; d < draws_per_probe; ++d) {
    out.probe_states.insert(out.probe_states.end(), probe_states.begin(), probe_states.end());
  }
  out.utilities.resize(static_cast<Eigen::Index>(mdps.size()), n);

  const Matrix next_values = next_belief.draw(draws_per_probe, rng);
  for (std::size_t j = 0; j < mdps.size(); ++j) {
    const DiscreteMdp& mdp = mdps[j];
    const Vector r = policy_reward(mdp, policy);
    const Matrix p = policy_transition(mdp, policy);
    for (int m = 0; m < n_probe; ++m) {
      const int s = probe_states[static_cast<std::size_t>(m)];
      const Eigen::RowVectorXd u = r(s) + mdp.discount() * (p.row(s) * next_values).array();
      for (int d = 0; d < draws_per_probe; ++d) out.utilities(static_cast<Eigen::Index>(j), d * n_probe + m) = u(d);
    }
  }
  return out;
}

UtilityGenerator::UtilityGenerator(RolloutMode mode, int n_states, int draws_per_state)
    : mode_(mode), n_states_(n_states), draws_(draws_per_state) {
  if (n_states < 1 || draws_per_state < 1) throw std::invalid_argument("utility generator needs states and draws");
  probes_.resize(static_cast<std::size_t>(n_states));
  for (int s = 0; s < n_states; ++s) probes_[static_cast<std::size_t>(s)] = s;
}

UtilitySampleSet UtilityGenerator::generate(std::span<const DiscreteMdp> mdps, const StationaryPolicy& policy,
                                            const GaussianSampler& bootstrap_belief, Rng& rng) {
  if (mode_ == RolloutMode::kBootstrapValue) {
    return generate_utility_samples(mdps, policy, bootstrap_belief, probes_, draws_, rng);
  }
  if (previous_.size() != mdps.size()) {
    previous_.assign(mdps.size(), Matrix::Zero(n_states_, draws_));
  }
  UtilitySampleSet out;
  out.probe_states.reserve(static_cast<std::size_t>(n_states_ * draws_));
  for (int d = 0; d < draws_; ++d) out.probe_states.insert(out.probe_states.end(), probes_.begin(), probes_.end());
  out.utilities.resize(static_cast<Eigen::Index>(mdps.size()), n_states_ * draws_);

  for (std::size_t j = 0; j < mdps.size(); ++j) {
    const DiscreteMdp& mdp = mdps[j];
    Matrix next(n_states_, draws_);
    if (mode_ == RolloutMode::kExpectedUtility) {
      next = (mdp.discount() * (policy_transition(mdp, policy) * previous_[j])).colwise() +
             policy_reward(mdp, policy);
    } else {
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (int s = 0; s < n_states_; ++s) {
        for (int d = 0; d < draws_; ++d) {
          const int a = policy.sample(s, rng);
          double u = unif(rng);
          int s2 = n_states_ - 1;
          const Matrix& p = mdp.transition(a);
          for (int t = 0; t < n_states_; ++t) {
            u -= p(s, t);
            if (u < 0.0) {
              s2 = t;
              break;
            }
          }
          next(s, d) = mdp.reward(s, a) + mdp.discount() * previous_[j](s2, d);
        }
      }
    }
    out.utilities.row(static_cast<Eigen::Index>(j)) = Eigen::Map<const Eigen::RowVectorXd>(next.data(), next.size());
    previous_[j] = std::move(next);
  }
  return out;
}

WeightResult compute_weights(const Matrix& probe_values, const Matrix& utilities, double sigma_sq) {
  if (!(sigma_sq > 0.0)) throw std::invalid_argument("likelihood variance must be positive");
  if (probe_values.rows() != utilities.cols()) {
    throw std::invalid_argument("probe values and utilities disagree on the number of probes");
  }
  const Eigen::Index n_mdps = utilities.rows();
  const Eigen::Index n_values = probe_values.cols();
  const double scale = -0.5 / sigma_sq;

  WeightResult out;
  out.weights.resize(n_mdps, n_values);
  Eigen::ArrayXXd exponents(n_mdps, utilities.cols());
  Eigen::ArrayXd log_lik(n_mdps);
  for (Eigen::Index k = 0; k < n_values; ++k) {
    const Eigen::Array<double, 1, Eigen::Dynamic> v = probe_values.col(k).transpose().array();
    exponents = (utilities.array().rowwise() - v).square() * scale;
    const double top = exponents.maxCoeff();
    if (top < kUnderflowExponent) out.underflow = true;
    for (Eigen::Index j = 0; j < n_mdps; ++j) {
      const double row_max = exponents.row(j).maxCoeff();
      log_lik(j) = row_max + std::log((exponents.row(j) - row_max).exp().sum());
    }
    const double lmax = log_lik.maxCoeff();
    Eigen::ArrayXd w = (log_lik - lmax).exp();
    out.weights.col(k) = (w / w.sum()).matrix();
  }
  return out;
}

WeightResult compute_weights(const Matrix& value_samples, const UtilitySampleSet& utilities, double sigma_sq) {
  const Eigen::Index n = static_cast<Eigen::Index>(utilities.probe_states.size());
  Matrix probe_values(n, value_samples.cols());
  for (Eigen::Index m = 0; m < n; ++m) {
    const int s = utilities.probe_states[static_cast<std::size_t>(m)];
    if (s < 0 || s >= value_samples.rows()) throw std::out_of_range("probe state outside value vector");
    probe_values.row(m) = value_samples.row(s);
  }
  return compute_weights(probe_values, utilities.utilities, sigma_sq);
}

Matrix uniform_weights(int n_mdps, int n_values) {
  return Matrix::Constant(n_mdps, n_values, 1.0 / n_mdps);
}

Matrix propagate_values(std::span<const DiscreteMdp> mdps, const StationaryPolicy& policy, const Matrix& next_samples) {
  const Eigen::Index n_values = next_samples.cols();
  Matrix out(next_samples.rows(), static_cast<Eigen::Index>(mdps.size()) * n_values);
  for (std::size_t j = 0; j < mdps.size(); ++j) {
    const DiscreteMdp& mdp = mdps[j];
    auto block = out.middleCols(static_cast<Eigen::Index>(j) * n_values, n_values);
    block.noalias() = mdp.discount() * (policy_transition(mdp, policy) * next_samples);
    block.colwise() += policy_reward(mdp, policy);
  }
  return out;
}

nlohmann::json WeightedValueEnsemble::to_json() const {
  return {{"values", matrix_to_json(values)}, {"weights", matrix_to_json(weights)}};
}

ValueBeliefGaussian fit_gaussian_belief(const WeightedValueEnsemble& ensemble) {
  const Eigen::Index n_mdps = ensemble.weights.rows();
  const Eigen::Index n_values = ensemble.weights.cols();
  if (ensemble.values.cols() != n_mdps * n_values) {
    throw std::invalid_argument("ensemble values and weights disagree in size");
  }
  // Column j*N_V + k pairs with w(j, k); the transpose flattens in that order.
  const Matrix wt = ensemble.weights.transpose();
  const Vector w = Eigen::Map<const Vector>(wt.data(), wt.size()) / static_cast<double>(n_values);

  ValueBeliefGaussian out;
  out.mean = ensemble.values * w;
  const Matrix centered = ensemble.values.colwise() - out.mean;
  out.covariance = centered * w.asDiagonal() * centered.transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  return out;
}

Matrix mc_value_distribution(const DirichletNormalGammaPosterior& posterior, const StationaryPolicy& policy,
                             int n_mdps, Rng& rng, RewardSampling rewards) {
  Matrix out(posterior.n_states(), n_mdps);
  for (int j = 0; j < n_mdps; ++j) {
    out.col(j) = exact_policy_value(posterior.sample_mdp(rng, rewards), policy);
  }
  return out;
}

StageDraw draw_weighted_stage(std::span<const DiscreteMdp> mdps, const StationaryPolicy& utility_policy,
                              const GaussianSampler& next_belief, const GaussianSampler& bootstrap_belief,
                              UtilityGenerator& utilities, const InductionConfig& config, LikelihoodScale& scale,
                              Rng& rng) {
  StageDraw out;
  out.values_next = next_belief.draw(config.n_value_samples, rng);
  const UtilitySampleSet u = utilities.generate(mdps, utility_policy, bootstrap_belief, rng);
  if (config.weight_mode == WeightMode::kMeanField) {
    out.weights = uniform_weights(static_cast<int>(mdps.size()), config.n_value_samples);
    return out;
  }
  for (int attempt = 0;; ++attempt) {
    WeightResult w = compute_weights(out.values_next, u, scale.sigma_sq());
    if (!w.underflow || attempt > config.max_sigma_doublings) {
      out.weights = std::move(w.weights);
      return out;
    }
    if (attempt > 0) scale.double_sigma();
    out.values_next = next_belief.draw(config.n_value_samples, rng);
  }
}

std::vector<ValueBeliefGaussian> policy_evaluation_method1(std::span<const DiscreteMdp> mdps,
                                                           const StationaryPolicy& policy,
                                                           const InductionConfig& config, LikelihoodScale& scale,
                                                           Rng& rng) {
  config.validate();
  if (mdps.empty()) throw std::invalid_argument("no MDP samples");
  const int n_states = mdps.front().n_states();
  const int horizon = config.lookahead;

  std::vector<ValueBeliefGaussian> beliefs(static_cast<std::size_t>(horizon));
  const ValueBeliefGaussian zero = ValueBeliefGaussian::point_mass(Vector::Zero(n_states));
  beliefs.back() = zero;

  UtilityGenerator generator(config.rollout, n_states, config.n_next_value_samples);
  GaussianSampler bootstrap(zero);
  GaussianSampler next(zero);
  for (int i = horizon - 2; i >= 0; --i) {
    const StageDraw draw = draw_weighted_stage(mdps, policy, next, bootstrap, generator, config, scale, rng);
    WeightedValueEnsemble ensemble{propagate_values(mdps, policy, draw.values_next), draw.weights};
    beliefs[static_cast<std::size_t>(i)] = fit_gaussian_belief(ensemble);
    bootstrap = next;
    next = GaussianSampler(beliefs[static_cast<std::size_t>(i)]);
  }
  return beliefs;
}

std::vector<ValueBeliefGaussian> policy_evaluation_method1(const DirichletNormalGammaPosterior& posterior,
                                                           const StationaryPolicy& policy,
                                                           const InductionConfig& config, LikelihoodScale& scale,
                                                           Rng& rng) {
  config.validate();
  const std::vector<DiscreteMdp> mdps = posterior.sample_mdps(config.n_mdp_samples, rng, config.reward_sampling);
  return policy_evaluation_method1(mdps, policy, config, scale, rng);
}

std::vector<ValueBeliefGaussian> mean_field_evaluation(const DirichletNormalGammaPosterior& posterior,
                                                       const StationaryPolicy& policy, const InductionConfig& config,
                                                       LikelihoodScale& scale, Rng& rng) {
  InductionConfig mean_field = config;
  mean_field.weight_mode = WeightMode::kMeanField;
  return policy_evaluation_method1(posterior, policy, mean_field, scale, rng);
}

}  // namespace infind
