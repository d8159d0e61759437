#include "infind/planners.hpp"

#include <cmath>
#include <stdexcept>

namespace infind {

Matrix bayes_q(std::span<const DiscreteMdp> mdps, const Matrix& weights, const Matrix& value_samples) {
  if (mdps.empty()) throw std::invalid_argument("no MDP samples");
  if (weights.rows() != static_cast<Eigen::Index>(mdps.size()) || weights.cols() != value_samples.cols()) {
    throw std::invalid_argument("weights must be N_M x N_V");
  }
  const int n_states = mdps.front().n_states();
  const int n_actions = mdps.front().n_actions();
  const double n_values = static_cast<double>(value_samples.cols());
  Matrix q = Matrix::Zero(n_states, n_actions);
  for (std::size_t j = 0; j < mdps.size(); ++j) {
    const DiscreteMdp& mdp = mdps[j];
    const Vector w = weights.row(static_cast<Eigen::Index>(j)).transpose() / n_values;
    const double mass = w.sum();
    const Vector v_bar = value_samples * w;
    for (int a = 0; a < n_actions; ++a) {
      q.col(a) += mass * mdp.reward_mean().col(a) + mdp.discount() * (mdp.transition(a) * v_bar);
    }
  }
  return q;
}

nlohmann::json PlanOutput::diagnostics() const {
  nlohmann::json stages = nlohmann::json::array();
  for (std::size_t i = 0; i < beliefs.size(); ++i) {
    const StationaryPolicy& pi = policy.step(i);
    std::vector<int> actions;
    for (int s = 0; s < pi.n_states(); ++s) actions.push_back(pi.mode(s));
    stages.push_back({{"step", i + 1},
                      {"belief", beliefs[i].to_json()},
                      {"policy", actions},
                      {"q", matrix_to_json(q_tables[i])}});
  }
  return {{"horizon", beliefs.size()}, {"stages", stages}};
}

PlanOutput bbi_plan(std::span<const DiscreteMdp> mdps, const InductionConfig& config, LikelihoodScale& scale,
                    Rng& rng) {
  config.validate();
  if (mdps.empty()) throw std::invalid_argument("no MDP samples");
  const int n_states = mdps.front().n_states();
  const int n_actions = mdps.front().n_actions();
  const int horizon = config.lookahead;
  const int n_mdps = static_cast<int>(mdps.size());

  std::vector<ValueBeliefGaussian> beliefs(static_cast<std::size_t>(horizon));
  std::vector<Matrix> q_tables(static_cast<std::size_t>(horizon));
  std::vector<StationaryPolicy> policies(static_cast<std::size_t>(horizon), StationaryPolicy::uniform(n_states, n_actions));

  const ValueBeliefGaussian zero = ValueBeliefGaussian::point_mass(Vector::Zero(n_states));
  beliefs.back() = zero;
  Matrix mean_reward = Matrix::Zero(n_states, n_actions);
  for (const DiscreteMdp& mdp : mdps) mean_reward += mdp.reward_mean();
  q_tables.back() = mean_reward / n_mdps;
  policies.back() = greedy_policy(q_tables.back());

  UtilityGenerator generator(config.rollout, n_states, config.n_next_value_samples);
  GaussianSampler bootstrap(zero);
  GaussianSampler next(zero);
  for (int i = horizon - 2; i >= 0; --i) {
    const auto idx = static_cast<std::size_t>(i);
    const StageDraw draw =
        draw_weighted_stage(mdps, policies[idx + 1], next, bootstrap, generator, config, scale, rng);
    q_tables[idx] = bayes_q(mdps, draw.weights, draw.values_next);
    policies[idx] = greedy_policy(q_tables[idx]);
    WeightedValueEnsemble ensemble{propagate_values(mdps, policies[idx], draw.values_next), draw.weights};
    beliefs[idx] = fit_gaussian_belief(ensemble);
    bootstrap = next;
    next = GaussianSampler(beliefs[idx]);
  }
  return PlanOutput{NonstationaryPolicy(std::move(policies)), std::move(beliefs), std::move(q_tables)};
}

PlanOutput bbi_plan(const DirichletNormalGammaPosterior& posterior, const InductionConfig& config,
                    LikelihoodScale& scale, Rng& rng) {
  config.validate();
  const std::vector<DiscreteMdp> mdps = posterior.sample_mdps(config.n_mdp_samples, rng, config.reward_sampling);
  return bbi_plan(mdps, config, scale, rng);
}

StationaryPolicy psrl_plan(const DirichletNormalGammaPosterior& posterior, Rng& rng, RewardSampling rewards) {
  return exact_optimal(posterior.sample_mdp(rng, rewards)).policy;
}

NonstationaryPolicy mmbi_plan(std::span<const DiscreteMdp> mdps, int horizon) {
  if (mdps.empty()) throw std::invalid_argument("no MDP samples");
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  const int n_states = mdps.front().n_states();
  const int n_actions = mdps.front().n_actions();
  std::vector<StationaryPolicy> policies(static_cast<std::size_t>(horizon), StationaryPolicy::uniform(n_states, n_actions));
  std::vector<Vector> values(mdps.size(), Vector::Zero(n_states));
  for (int i = horizon - 1; i >= 0; --i) {
    Matrix q = Matrix::Zero(n_states, n_actions);
    std::vector<Matrix> per_mdp;
    per_mdp.reserve(mdps.size());
    for (std::size_t j = 0; j < mdps.size(); ++j) {
      per_mdp.push_back(q_backup(mdps[j], values[j]));
      q += per_mdp.back();
    }
    const std::vector<int> actions = greedy_actions(q);
    for (std::size_t j = 0; j < mdps.size(); ++j) {
      for (int s = 0; s < n_states; ++s) values[j](s) = per_mdp[j](s, actions[static_cast<std::size_t>(s)]);
    }
    policies[static_cast<std::size_t>(i)] = StationaryPolicy::deterministic(actions, n_actions);
  }
  return NonstationaryPolicy(std::move(policies));
}

NonstationaryPolicy mmbi_plan(const DirichletNormalGammaPosterior& posterior, int n_mdps, int horizon, Rng& rng,
                              RewardSampling rewards) {
  const std::vector<DiscreteMdp> mdps = posterior.sample_mdps(n_mdps, rng, rewards);
  return mmbi_plan(mdps, horizon);
}

MeanEstimate bayes_upper_bound(const DirichletNormalGammaPosterior& posterior, int start_state, int n_samples,
                               Rng& rng, RewardSampling rewards) {
  if (n_samples < 1) throw std::invalid_argument("bayes_upper_bound needs at least one sample");
  if (start_state < 0 || start_state >= posterior.n_states()) throw std::out_of_range("start state out of range");
  Vector values(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    values(i) = exact_optimal(posterior.sample_mdp(rng, rewards)).value(start_state);
  }
  MeanEstimate out;
  out.mean = values.mean();
  if (n_samples > 1) {
    const double var = (values.array() - out.mean).square().sum() / (n_samples - 1);
    out.standard_error = std::sqrt(var / n_samples);
  }
  return out;
}

}  // namespace infind
