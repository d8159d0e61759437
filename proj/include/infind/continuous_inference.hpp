#pragma once

#include <span>
#include <vector>

#include "json.hpp"

#include "infind/environments.hpp"
#include "infind/inference.hpp"
#include "infind/posterior.hpp"

namespace infind {

/// Per-action summary of a weighted fitted-Q regression.
struct FittedQEntry {
  Vector omega;          // Q(s, a) ~ phi(s)^T omega
  double sigma = 0.0;    // residual standard deviation
  double mean = 0.0;     // m^a, average fitted Q over the training states
  double variance = 0.0; // S^a
};

/// omega = (Phi^T W Phi + lambda I)^{-1} Phi^T W q with W = diag(weights).
/// `features` is N x f with one training state per row.
FittedQEntry fitted_q_belief(const Matrix& features, const Vector& q_values, const Vector& weights, double lambda);

/// psi_i for continuous state: one fitted-Q entry per action. Value samples
/// are V^(k)(s) = phi(s)^T omega_a + eps_a^(k), eps_a^(k) ~ N(0, S^a), with a
/// greedy on the mean Q.
class FittedQBelief {
 public:
  FittedQBelief() = default;
  explicit FittedQBelief(std::vector<FittedQEntry> entries);
  static FittedQBelief zero(int n_actions, int feature_dim);

  int n_actions() const { return static_cast<int>(entries_.size()); }
  const FittedQEntry& entry(int action) const { return entries_.at(static_cast<std::size_t>(action)); }
  bool is_zero() const;

  Vector q_values(const Vector& phi) const;
  /// Lowest action index on ties.
  int greedy_action(const Vector& phi) const;
  double mean_value(const Vector& phi) const;

  nlohmann::json to_json() const;
  static FittedQBelief from_json(const nlohmann::json& doc);

 private:
  std::vector<FittedQEntry> entries_;
};

struct ContinuousPlan {
  /// psi_1 ... psi_T; psi_T is identically zero.
  std::vector<FittedQBelief> beliefs;

  const FittedQBelief& first() const { return beliefs.front(); }
  int act(const Vector& phi) const { return beliefs.front().greedy_action(phi); }
};

/// Backwards induction over fitted-Q beliefs for a continuous state space.
/// Probe and training states come from `history` with probability
/// history_fraction and from the support box otherwise.
ContinuousPlan bbi_plan_continuous(std::span<const LinearMdpSample> mdps, const ContinuousModelSpec& model,
                                   std::span<const Vector> history, const InductionConfig& config,
                                   LikelihoodScale& scale, Rng& rng);
ContinuousPlan bbi_plan_continuous(const BayesLinRegPosterior& posterior, const ContinuousModelSpec& model,
                                   std::span<const Vector> history, const InductionConfig& config,
                                   LikelihoodScale& scale, Rng& rng);

}  // namespace infind
