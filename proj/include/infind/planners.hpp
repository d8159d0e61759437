#pragma once

#include <span>
#include <vector>

#include "json.hpp"

#include "infind/inference.hpp"
#include "infind/mdp.hpp"
#include "infind/posterior.hpp"

namespace infind {

/// Q(s,a) = sum_jk w_jk / N_V * [r_j(s,a) + gamma sum_s' P_j(s'|s,a) V^(k)(s')].
/// `weights` is N_M x N_V; `value_samples` n_states x N_V.
Matrix bayes_q(std::span<const DiscreteMdp> mdps, const Matrix& weights, const Matrix& value_samples);

struct PlanOutput {
  NonstationaryPolicy policy;
  /// psi_1 ... psi_T.
  std::vector<ValueBeliefGaussian> beliefs;
  /// Q tables behind pi_1 ... pi_T.
  std::vector<Matrix> q_tables;

  int first_action(int state) const { return policy.first().mode(state); }
  nlohmann::json diagnostics() const;
};

/// Bayesian backwards induction with Method-1 value beliefs.
PlanOutput bbi_plan(std::span<const DiscreteMdp> mdps, const InductionConfig& config, LikelihoodScale& scale,
                    Rng& rng);
PlanOutput bbi_plan(const DirichletNormalGammaPosterior& posterior, const InductionConfig& config,
                    LikelihoodScale& scale, Rng& rng);

/// Posterior sampling: optimal policy of one sampled MDP.
StationaryPolicy psrl_plan(const DirichletNormalGammaPosterior& posterior, Rng& rng,
                           RewardSampling rewards = RewardSampling::kSampled);

/// Multi-MDP backwards induction: V_i = max_a mean_j Q_j(s,a) over N_M
/// sampled MDPs, horizon T.
NonstationaryPolicy mmbi_plan(std::span<const DiscreteMdp> mdps, int horizon);
NonstationaryPolicy mmbi_plan(const DirichletNormalGammaPosterior& posterior, int n_mdps, int horizon, Rng& rng,
                              RewardSampling rewards = RewardSampling::kSampled);

struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Monte-Carlo estimate of the Bayes upper bound E_mu[max_pi V^pi_mu(s0)]
/// under the posterior (or prior) over MDPs.
MeanEstimate bayes_upper_bound(const DirichletNormalGammaPosterior& posterior, int start_state, int n_samples,
                               Rng& rng, RewardSampling rewards = RewardSampling::kSampled);

}  // namespace infind
