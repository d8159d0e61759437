#pragma once

#include <vector>

#include "infind/random.hpp"

namespace infind {

/// Tabular MDP: kernel P(s'|s,a), mean reward r(s,a) and discount.
/// Immutable after construction; the constructor enforces row-stochastic
/// kernels and 0 <= discount < 1 (a zero discount is only meaningful in tests).
class DiscreteMdp {
 public:
  /// `transitions[a](s, s')` is P(s'|s,a); `reward_mean(s, a)` is r(s,a).
  DiscreteMdp(std::vector<Matrix> transitions, Matrix reward_mean, double discount);

  int n_states() const { return static_cast<int>(reward_mean_.rows()); }
  int n_actions() const { return static_cast<int>(reward_mean_.cols()); }
  double discount() const { return discount_; }

  const Matrix& transition(int action) const { return transitions_[static_cast<std::size_t>(action)]; }
  double transition(int state, int action, int next_state) const {
    return transitions_[static_cast<std::size_t>(action)](state, next_state);
  }
  const Matrix& reward_mean() const { return reward_mean_; }
  double reward(int state, int action) const { return reward_mean_(state, action); }

  DiscreteMdp with_discount(double discount) const;

 private:
  std::vector<Matrix> transitions_;
  Matrix reward_mean_;
  double discount_;
};

/// pi(a|s) as an n_states x n_actions table with unit row sums.
class StationaryPolicy {
 public:
  explicit StationaryPolicy(Matrix action_prob);

  static StationaryPolicy uniform(int n_states, int n_actions);
  static StationaryPolicy deterministic(const std::vector<int>& actions, int n_actions);

  int n_states() const { return static_cast<int>(prob_.rows()); }
  int n_actions() const { return static_cast<int>(prob_.cols()); }
  const Matrix& table() const { return prob_; }
  double prob(int state, int action) const { return prob_(state, action); }

  /// Most probable action, lowest index on ties.
  int mode(int state) const;
  int sample(int state, Rng& rng) const;

  friend bool operator==(const StationaryPolicy& a, const StationaryPolicy& b) {
    return a.prob_.rows() == b.prob_.rows() && a.prob_.cols() == b.prob_.cols() && a.prob_ == b.prob_;
  }

 private:
  Matrix prob_;
};

/// (pi_1, ..., pi_T); element 0 is the first step.
class NonstationaryPolicy {
 public:
  explicit NonstationaryPolicy(std::vector<StationaryPolicy> steps);

  std::size_t horizon() const { return steps_.size(); }
  const StationaryPolicy& step(std::size_t i) const { return steps_.at(i); }
  const StationaryPolicy& first() const { return steps_.front(); }
  const std::vector<StationaryPolicy>& steps() const { return steps_; }

 private:
  std::vector<StationaryPolicy> steps_;
};

/// r(s, pi) = sum_a pi(a|s) r(s,a).
Vector policy_reward(const DiscreteMdp& mdp, const StationaryPolicy& policy);
/// P^pi(s'|s) = sum_a pi(a|s) P(s'|s,a).
Matrix policy_transition(const DiscreteMdp& mdp, const StationaryPolicy& policy);

/// (B^pi V)(s) = r(s,pi) + gamma * sum_s' P^pi(s'|s) V(s').
Vector bellman_backup(const DiscreteMdp& mdp, const StationaryPolicy& policy, const Vector& v_next);

/// Q(s,a) = r(s,a) + gamma * sum_s' P(s'|s,a) V(s').
Matrix q_backup(const DiscreteMdp& mdp, const Vector& v_next);

/// Argmax per row; the lowest action index wins ties.
std::vector<int> greedy_actions(const Matrix& q);
StationaryPolicy greedy_policy(const Matrix& q);

/// Fixed point of B^pi. Solves (I - gamma P^pi) V = r^pi directly for up to
/// 2000 states, iterates otherwise.
Vector exact_policy_value(const DiscreteMdp& mdp, const StationaryPolicy& policy);

struct OptimalSolution {
  StationaryPolicy policy;
  Vector value;
  int sweeps = 0;
};

/// Value iteration to a 1e-9 sup-norm change (at most 1e5 sweeps), greedy policy.
OptimalSolution exact_optimal(const DiscreteMdp& mdp);

struct InductionResult {
  NonstationaryPolicy policy;
  /// values[i] is V_{i+1}; values[T] is the zero terminal value.
  std::vector<Vector> values;
};

InductionResult backwards_induction(const DiscreteMdp& mdp, int horizon);

/// Stationary distribution of the chain P^pi (assumes a single recurrent class).
Vector stationary_distribution(const DiscreteMdp& mdp, const StationaryPolicy& policy);

/// Long-run average reward of `policy` under the stationary distribution.
double average_reward(const DiscreteMdp& mdp, const StationaryPolicy& policy);

}  // namespace infind
