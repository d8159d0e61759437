#include "infind/mdp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace infind {

namespace {

constexpr double kRowSumTolerance = 1e-9;
constexpr double kValueIterationTolerance = 1e-9;
constexpr int kMaxSweeps = 100000;
constexpr int kDirectSolveLimit = 2000;

void check_dimensions(const DiscreteMdp& mdp, const StationaryPolicy& policy) {
  if (policy.n_states() != mdp.n_states() || policy.n_actions() != mdp.n_actions()) {
    throw std::invalid_argument("policy dimensions do not match the MDP");
  }
}

}  // namespace

DiscreteMdp::DiscreteMdp(std::vector<Matrix> transitions, Matrix reward_mean, double discount)
    : transitions_(std::move(transitions)), reward_mean_(std::move(reward_mean)), discount_(discount) {
  const auto n_states = reward_mean_.rows();
  const auto n_actions = reward_mean_.cols();
  if (n_states < 1 || n_actions < 1) throw std::invalid_argument("MDP needs at least one state and action");
  if (static_cast<Eigen::Index>(transitions_.size()) != n_actions) {
    throw std::invalid_argument("one transition matrix per action is required");
  }
  if (!(discount_ >= 0.0 && discount_ < 1.0)) throw std::invalid_argument("discount must lie in [0, 1)");
  if (!reward_mean_.allFinite()) throw std::invalid_argument("rewards must be finite");
  for (std::size_t a = 0; a < transitions_.size(); ++a) {
    const Matrix& p = transitions_[a];
    if (p.rows() != n_states || p.cols() != n_states) {
      throw std::invalid_argument("transition matrix for action " + std::to_string(a) + " has wrong shape");
    }
    if ((p.array() < 0.0).any() || !p.allFinite()) {
      throw std::invalid_argument("transition probabilities must be finite and nonnegative");
    }
    for (Eigen::Index s = 0; s < n_states; ++s) {
      if (std::abs(p.row(s).sum() - 1.0) > kRowSumTolerance) {
        throw std::invalid_argument("transition row (" + std::to_string(s) + "," + std::to_string(a) +
                                    ") does not sum to one");
      }
    }
  }
}

DiscreteMdp DiscreteMdp::with_discount(double discount) const {
  return DiscreteMdp(transitions_, reward_mean_, discount);
}

StationaryPolicy::StationaryPolicy(Matrix action_prob) : prob_(std::move(action_prob)) {
  if (prob_.rows() < 1 || prob_.cols() < 1) throw std::invalid_argument("empty policy table");
  if ((prob_.array() < 0.0).any() || !prob_.allFinite()) {
    throw std::invalid_argument("policy probabilities must be finite and nonnegative");
  }
  for (Eigen::Index s = 0; s < prob_.rows(); ++s) {
    if (std::abs(prob_.row(s).sum() - 1.0) > kRowSumTolerance) {
      throw std::invalid_argument("policy row " + std::to_string(s) + " does not sum to one");
    }
  }
}

StationaryPolicy StationaryPolicy::uniform(int n_states, int n_actions) {
  return StationaryPolicy(Matrix::Constant(n_states, n_actions, 1.0 / n_actions));
}

StationaryPolicy StationaryPolicy::deterministic(const std::vector<int>& actions, int n_actions) {
  Matrix table = Matrix::Zero(static_cast<Eigen::Index>(actions.size()), n_actions);
  for (std::size_t s = 0; s < actions.size(); ++s) {
    if (actions[s] < 0 || actions[s] >= n_actions) throw std::out_of_range("action index out of range");
    table(static_cast<Eigen::Index>(s), actions[s]) = 1.0;
  }
  return StationaryPolicy(std::move(table));
}

int StationaryPolicy::mode(int state) const {
  Eigen::Index best = 0;
  prob_.row(state).maxCoeff(&best);
  return static_cast<int>(best);
}

int StationaryPolicy::sample(int state, Rng& rng) const {
  const auto row = prob_.row(state);
  // Deterministic rows consume no randomness.
  for (Eigen::Index a = 0; a < row.size(); ++a) {
    if (row[a] == 1.0) return static_cast<int>(a);
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  double acc = 0.0;
  for (Eigen::Index a = 0; a < row.size(); ++a) {
    acc += row[a];
    if (u < acc) return static_cast<int>(a);
  }
  return static_cast<int>(row.size() - 1);
}

NonstationaryPolicy::NonstationaryPolicy(std::vector<StationaryPolicy> steps) : steps_(std::move(steps)) {
  if (steps_.empty()) throw std::invalid_argument("a nonstationary policy needs at least one step");
}

Vector policy_reward(const DiscreteMdp& mdp, const StationaryPolicy& policy) {
  check_dimensions(mdp, policy);
  return mdp.reward_mean().cwiseProduct(policy.table()).rowwise().sum();
}

Matrix policy_transition(const DiscreteMdp& mdp, const StationaryPolicy& policy) {
  check_dimensions(mdp, policy);
  Matrix p = Matrix::Zero(mdp.n_states(), mdp.n_states());
  for (int a = 0; a < mdp.n_actions(); ++a) {
    p.noalias() += policy.table().col(a).asDiagonal() * mdp.transition(a);
  }
  return p;
}

Vector bellman_backup(const DiscreteMdp& mdp, const StationaryPolicy& policy, const Vector& v_next) {
  if (v_next.size() != mdp.n_states()) throw std::invalid_argument("value vector has wrong length");
  return policy_reward(mdp, policy) + mdp.discount() * (policy_transition(mdp, policy) * v_next);
}

Matrix q_backup(const DiscreteMdp& mdp, const Vector& v_next) {
  if (v_next.size() != mdp.n_states()) throw std::invalid_argument("value vector has wrong length");
  Matrix q(mdp.n_states(), mdp.n_actions());
  for (int a = 0; a < mdp.n_actions(); ++a) {
    q.col(a) = mdp.reward_mean().col(a) + mdp.discount() * (mdp.transition(a) * v_next);
  }
  return q;
}

std::vector<int> greedy_actions(const Matrix& q) {
  std::vector<int> actions(static_cast<std::size_t>(q.rows()));
  for (Eigen::Index s = 0; s < q.rows(); ++s) {
    int best = 0;
    for (Eigen::Index a = 1; a < q.cols(); ++a) {
      if (q(s, a) > q(s, best)) best = static_cast<int>(a);
    }
    actions[static_cast<std::size_t>(s)] = best;
  }
  return actions;
}

StationaryPolicy greedy_policy(const Matrix& q) {
  return StationaryPolicy::deterministic(greedy_actions(q), static_cast<int>(q.cols()));
}

Vector exact_policy_value(const DiscreteMdp& mdp, const StationaryPolicy& policy) {
  const Vector r = policy_reward(mdp, policy);
  const Matrix p = policy_transition(mdp, policy);
  const int n = mdp.n_states();
  if (n <= kDirectSolveLimit) {
    Matrix system = Matrix::Identity(n, n) - mdp.discount() * p;
    Eigen::PartialPivLU<Matrix> lu(system);
    Vector v = lu.solve(r);
    if (!v.allFinite()) throw NumericalError("policy evaluation system is singular");
    // One refinement step keeps the Bellman residual at round-off level.
    v += lu.solve(r - system * v);
    return v;
  }
  Vector v = Vector::Zero(n);
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    Vector next = r + mdp.discount() * (p * v);
    double change = (next - v).lpNorm<Eigen::Infinity>();
    v = std::move(next);
    if (change * mdp.discount() / (1.0 - mdp.discount()) <= 1e-10) break;
  }
  return v;
}

OptimalSolution exact_optimal(const DiscreteMdp& mdp) {
  Vector v = Vector::Zero(mdp.n_states());
  int sweeps = 0;
  for (; sweeps < kMaxSweeps; ++sweeps) {
    Vector next = q_backup(mdp, v).rowwise().maxCoeff();
    double change = (next - v).lpNorm<Eigen::Infinity>();
    v = std::move(next);
    if (change <= kValueIterationTolerance) break;
  }
  StationaryPolicy policy = greedy_policy(q_backup(mdp, v));
  // Polish the greedy policy's value so the returned pair is self-consistent.
  Vector value = exact_policy_value(mdp, policy);
  return {std::move(policy), std::move(value), sweeps + 1};
}

InductionResult backwards_induction(const DiscreteMdp& mdp, int horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  const auto t = static_cast<std::size_t>(horizon);
  std::vector<Vector> values(t + 1);
  std::vector<StationaryPolicy> steps;
  steps.reserve(t);
  values[t] = Vector::Zero(mdp.n_states());
  std::vector<StationaryPolicy> reversed;
  for (std::size_t i = t; i-- > 0;) {
    Matrix q = q_backup(mdp, values[i + 1]);
    std::vector<int> actions = greedy_actions(q);
    Vector v(mdp.n_states());
    for (int s = 0; s < mdp.n_states(); ++s) v[s] = q(s, actions[static_cast<std::size_t>(s)]);
    values[i] = std::move(v);
    reversed.push_back(StationaryPolicy::deterministic(actions, mdp.n_actions()));
  }
  for (auto it = reversed.rbegin(); it != reversed.rend(); ++it) steps.push_back(std::move(*it));
  return {NonstationaryPolicy(std::move(steps)), std::move(values)};
}

Vector stationary_distribution(const DiscreteMdp& mdp, const StationaryPolicy& policy) {
  const Matrix p = policy_transition(mdp, policy);
  const int n = mdp.n_states();
  Matrix system(n + 1, n);
  system.topRows(n) = p.transpose() - Matrix::Identity(n, n);
  system.row(n).setOnes();
  Vector rhs = Vector::Zero(n + 1);
  rhs[n] = 1.0;
  Vector d = system.colPivHouseholderQr().solve(rhs);
  d = d.cwiseMax(0.0);
  return d / d.sum();
}

double average_reward(const DiscreteMdp& mdp, const StationaryPolicy& policy) {
  return stationary_distribution(mdp, policy).dot(policy_reward(mdp, policy));
}

}  // namespace infind
