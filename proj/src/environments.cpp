#include "infind/environments.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace infind {

namespace {

void check_action(int action, int n_actions) {
  if (action < 0 || action >= n_actions) throw std::out_of_range("invalid action index " + std::to_string(action));
}

}  // namespace

DiscreteStep DiscreteEnvironment::step(int action) {
  check_action(action, n_actions());
  DiscreteStep result = transition(action);
  state_ = result.next_state;
  return result;
}

void DiscreteEnvironment::set_state(int state) {
  if (state < 0 || state >= n_states()) throw std::out_of_range("state index out of range");
  state_ = state;
}

// ---------------------------------------------------------------- NChain

NChain::NChain(std::uint64_t seed, double slip) : DiscreteEnvironment(seed), slip_(slip) {
  if (slip < 0.0 || slip > 1.0) throw std::invalid_argument("slip must be a probability");
  reset();
}

namespace {

std::pair<int, double> nchain_effect(int state, int effective_action) {
  if (effective_action == 0) return {0, 2.0};
  if (state < 4) return {state + 1, 0.0};
  return {4, 10.0};
}

}  // namespace

DiscreteStep NChain::transition(int action) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int effective = unif(rng_) < slip_ ? 1 - action : action;
  auto [next, reward] = nchain_effect(state_, effective);
  return {next, reward, false};
}

DiscreteMdp NChain::as_mdp(double discount) const {
  std::vector<Matrix> p(2, Matrix::Zero(5, 5));
  Matrix r = Matrix::Zero(5, 2);
  for (int s = 0; s < 5; ++s) {
    for (int a = 0; a < 2; ++a) {
      for (int effective : {a, 1 - a}) {
        const double prob = effective == a ? 1.0 - slip_ : slip_;
        auto [next, reward] = nchain_effect(s, effective);
        p[static_cast<std::size_t>(a)](s, next) += prob;
        r(s, a) += prob * reward;
      }
    }
  }
  return DiscreteMdp(std::move(p), std::move(r), discount);
}

// ---------------------------------------------------------------- DoubleLoop

DoubleLoop::DoubleLoop(std::uint64_t seed) : DiscreteEnvironment(seed) { reset(); }

std::pair<int, double> DoubleLoop::successor(int state, int action) {
  if (state == 0) return {action == 0 ? 1 : 5, 0.0};
  if (state >= 1 && state <= 4) {
    // Right loop: either action advances.
    return state == 4 ? std::pair{0, 1.0} : std::pair{state + 1, 0.0};
  }
  // Left loop.
  if (action == 0) return {0, 0.0};
  return state == 8 ? std::pair{0, 2.0} : std::pair{state + 1, 0.0};
}

DiscreteStep DoubleLoop::transition(int action) {
  auto [next, reward] = successor(state_, action);
  return {next, reward, false};
}

DiscreteMdp DoubleLoop::as_mdp(double discount) const {
  std::vector<Matrix> p(2, Matrix::Zero(9, 9));
  Matrix r = Matrix::Zero(9, 2);
  for (int s = 0; s < 9; ++s) {
    for (int a = 0; a < 2; ++a) {
      auto [next, reward] = successor(s, a);
      p[static_cast<std::size_t>(a)](s, next) = 1.0;
      r(s, a) = reward;
    }
  }
  return DiscreteMdp(std::move(p), std::move(r), discount);
}

// ---------------------------------------------------------------- grid helpers

namespace {

Direction sample_direction(const GridMap& map, Direction intended, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  for (const auto& [dir, prob] : map.outcome_distribution(intended)) {
    if (u < prob) return dir;
    u -= prob;
  }
  return intended;
}

}  // namespace

// ---------------------------------------------------------------- LavaLake

LavaLake::LavaLake(GridMap map, std::uint64_t seed) : DiscreteEnvironment(seed), map_(std::move(map)) { reset(); }

LavaLake LavaLake::small(std::uint64_t seed) { return LavaLake(parse_grid_map(lavalake_5x7_text()), seed); }
LavaLake LavaLake::large(std::uint64_t seed) { return LavaLake(parse_grid_map(lavalake_10x10_text()), seed); }

DiscreteStep LavaLake::resolve(int state, Direction dir) const {
  const Cell from = map_.locations()[static_cast<std::size_t>(state)];
  const CellKind here = map_.at(from);
  if (here == CellKind::kGoal || here == CellKind::kLava) {
    // Never occupied: entering these cells resets the episode.
    return {start_state(), 0.0, true};
  }
  const Cell to = map_.move(from, dir);
  switch (map_.at(to)) {
    case CellKind::kGoal: return {start_state(), 50.0, true};
    case CellKind::kLava: return {start_state(), -50.0, true};
    default: return {map_.location_index(to), -1.0, false};
  }
}

DiscreteStep LavaLake::transition(int action) {
  return resolve(state_, sample_direction(map_, static_cast<Direction>(action), rng_));
}

DiscreteMdp LavaLake::as_mdp(double discount) const {
  const int n = n_states();
  std::vector<Matrix> p(4, Matrix::Zero(n, n));
  Matrix r = Matrix::Zero(n, 4);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < 4; ++a) {
      for (const auto& [dir, prob] : map_.outcome_distribution(static_cast<Direction>(a))) {
        DiscreteStep out = resolve(s, dir);
        p[static_cast<std::size_t>(a)](s, out.next_state) += prob;
        r(s, a) += prob * out.reward;
      }
    }
  }
  return DiscreteMdp(std::move(p), std::move(r), discount);
}

// ---------------------------------------------------------------- Maze

Maze::Maze(GridMap map, std::uint64_t seed) : DiscreteEnvironment(seed), map_(std::move(map)) {
  if (map_.flags().size() > 16) throw std::invalid_argument("too many flags");
  reset();
}

Maze Maze::standard(std::uint64_t seed) { return Maze(parse_grid_map(maze_text()), seed); }

DiscreteStep Maze::resolve(int state, Direction dir) const {
  const int location = location_of(state);
  int mask = mask_of(state);
  const Cell from = map_.locations()[static_cast<std::size_t>(location)];
  if (map_.at(from) == CellKind::kGoal) return {start_state(), 0.0, true};
  const Cell to = map_.move(from, dir);
  const CellKind kind = map_.at(to);
  if (kind == CellKind::kGoal) {
    return {start_state(), static_cast<double>(std::popcount(static_cast<unsigned>(mask))), true};
  }
  if (kind == CellKind::kFlag) {
    const auto& flags = map_.flags();
    for (std::size_t f = 0; f < flags.size(); ++f) {
      if (flags[f] == to) mask |= 1 << f;
    }
  }
  return {encode(map_.location_index(to), mask), 0.0, false};
}

DiscreteStep Maze::transition(int action) {
  return resolve(state_, sample_direction(map_, static_cast<Direction>(action), rng_));
}

DiscreteMdp Maze::as_mdp(double discount) const {
  const int n = n_states();
  std::vector<Matrix> p(4, Matrix::Zero(n, n));
  Matrix r = Matrix::Zero(n, 4);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < 4; ++a) {
      for (const auto& [dir, prob] : map_.outcome_distribution(static_cast<Direction>(a))) {
        DiscreteStep out = resolve(s, dir);
        p[static_cast<std::size_t>(a)](s, out.next_state) += prob;
        r(s, a) += prob * out.reward;
      }
    }
  }
  return DiscreteMdp(std::move(p), std::move(r), discount);
}

// ---------------------------------------------------------------- continuous

Vector Box::sample(Rng& rng) const {
  Vector s(lower.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    std::uniform_real_distribution<double> unif(lower[i], upper[i]);
    s[i] = unif(rng);
  }
  return s;
}

ContinuousModelSpec ContinuousEnvironment::model_spec() const {
  ContinuousModelSpec spec;
  // The lambdas only reference immutable configuration of *this.
  spec.features = [this](const Vector& s) { return features(s); };
  spec.is_terminal = [this](const Vector& s) { return is_failure(s); };
  spec.feature_dim = feature_dim();
  spec.state_dim = state_dim();
  spec.n_actions = n_actions();
  spec.support = support();
  spec.increment_target = models_increment();
  if (rewards_bounded()) spec.reward_bounds = reward_range();
  return spec;
}

double spectral_radius(const Matrix& m) {
  Eigen::EigenSolver<Matrix> solver(m, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

LinearModel::LinearModel(std::uint64_t matrix_seed, std::uint64_t seed, LinearModelOptions options)
    : ContinuousEnvironment(seed), options_(options) {
  if (options_.state_dim < 1 || options_.n_actions < 1) throw std::invalid_argument("invalid linear model size");
  Rng matrix_rng = make_rng(matrix_seed, 0x6c696e);
  const int d = options_.state_dim;
  for (int a = 0; a < options_.n_actions; ++a) {
    Matrix dyn = standard_normal(d, d, matrix_rng) / std::sqrt(static_cast<double>(d));
    const double radius = spectral_radius(dyn);
    if (radius > options_.spectral_radius_cap) dyn *= options_.spectral_radius_cap / radius;
    dynamics_.push_back(std::move(dyn));
    reward_weights_.push_back(standard_normal(d, matrix_rng));
  }
  reset();
}

Box LinearModel::support() const {
  const int d = options_.state_dim;
  return {Vector::Constant(d, -options_.support_halfwidth), Vector::Constant(d, options_.support_halfwidth)};
}

RewardRange LinearModel::reward_range() const {
  double widest = 0.0;
  for (const Vector& w : reward_weights_) widest = std::max(widest, w.lpNorm<1>() * options_.support_halfwidth);
  return {-widest, widest};
}

Vector LinearModel::reset() {
  const int d = options_.state_dim;
  state_ = Box{Vector::Constant(d, -options_.start_halfwidth), Vector::Constant(d, options_.start_halfwidth)}.sample(rng_);
  episode_step_ = 0;
  return state_;
}

ContinuousStep LinearModel::step(int action) {
  check_action(action, options_.n_actions);
  const auto a = static_cast<std::size_t>(action);
  const double reward = reward_weights_[a].dot(state_);
  Vector next = dynamics_[a] * state_;
  if (options_.noise_std > 0.0) next += options_.noise_std * standard_normal(next.size(), rng_);
  ++episode_step_;
  const bool terminal = next.lpNorm<Eigen::Infinity>() > options_.reset_norm ||
                        episode_step_ >= options_.max_episode_steps;
  ContinuousStep result{next, reward, terminal};
  if (terminal) {
    reset();
  } else {
    state_ = std::move(next);
  }
  return result;
}

Vector pendulum_features(const Vector& state) {
  constexpr double kPi = std::numbers::pi;
  constexpr double kSigmaSq = 1.0;
  Vector phi(10);
  phi[0] = 1.0;
  int i = 1;
  for (double theta : {-kPi / 4.0, 0.0, kPi / 4.0}) {
    for (double theta_dot : {-1.0, 0.0, 1.0}) {
      const double d0 = state[0] - theta;
      const double d1 = state[1] - theta_dot;
      phi[i++] = std::exp(-(d0 * d0 + d1 * d1) / (2.0 * kSigmaSq));
    }
  }
  return phi;
}

InvertedPendulum::InvertedPendulum(std::uint64_t seed, PendulumOptions options)
    : ContinuousEnvironment(seed), options_(options) {
  reset();
}

Vector InvertedPendulum::features(const Vector& state) const { return pendulum_features(state); }

bool InvertedPendulum::is_failure(const Vector& state) const {
  return std::abs(state[0]) > std::numbers::pi / 2.0;
}

Box InvertedPendulum::support() const {
  const double half_pi = std::numbers::pi / 2.0;
  Vector lo(2), hi(2);
  lo << -half_pi, -options_.support_velocity;
  hi << half_pi, options_.support_velocity;
  return {lo, hi};
}

Vector InvertedPendulum::reset() {
  const double h = options_.start_halfwidth;
  state_ = Box{Vector::Constant(2, -h), Vector::Constant(2, h)}.sample(rng_);
  episode_step_ = 0;
  return state_;
}

Vector InvertedPendulum::dynamics(const Vector& state, double u) const {
  const double theta = state[0];
  const double theta_dot = state[1];
  const double m = options_.pole_mass;
  const double l = options_.pole_length;
  const double alpha = 1.0 / (options_.pole_mass + options_.cart_mass);
  const double c = std::cos(theta);
  const double accel = (options_.gravity * std::sin(theta) - alpha * m * l * theta_dot * theta_dot * std::sin(2.0 * theta) / 2.0 -
                        alpha * c * u) /
                       (4.0 * l / 3.0 - alpha * m * l * c * c);
  Vector next(2);
  next[0] = theta + options_.dt * theta_dot;
  next[1] = theta_dot + options_.dt * accel;
  return next;
}

ContinuousStep InvertedPendulum::step(int action) {
  check_action(action, 3);
  double u = (action - 1) * options_.force;
  if (noise_enabled_ && options_.force_noise > 0.0) {
    std::uniform_real_distribution<double> noise(-options_.force_noise, options_.force_noise);
    u += noise(rng_);
  }
  Vector next = dynamics(state_, u);
  ++episode_step_;
  const bool failed = is_failure(next);
  const bool succeeded = !failed && episode_step_ >= options_.success_steps;
  ContinuousStep result{next, failed ? -1.0 : 0.0, failed || succeeded};
  if (result.terminal) {
    reset();
  } else {
    state_ = std::move(next);
  }
  return result;
}

// ---------------------------------------------------------------- factories

bool is_discrete_environment(const std::string& id) {
  return id == "nchain" || id == "doubleloop" || id == "lavalake5x7" || id == "lavalake10x10" || id == "maze";
}

bool is_continuous_environment(const std::string& id) { return id == "linear" || id == "pendulum"; }

std::unique_ptr<DiscreteEnvironment> make_discrete_environment(const std::string& id, std::uint64_t seed,
                                                               const std::string& map_file) {
  if (id == "nchain") return std::make_unique<NChain>(seed);
  if (id == "doubleloop") return std::make_unique<DoubleLoop>(seed);
  if (id == "lavalake5x7" || id == "lavalake10x10") {
    GridMap map = !map_file.empty() ? load_grid_map(map_file)
                                    : parse_grid_map(id == "lavalake5x7" ? lavalake_5x7_text() : lavalake_10x10_text());
    return std::make_unique<LavaLake>(std::move(map), seed);
  }
  if (id == "maze") {
    GridMap map = !map_file.empty() ? load_grid_map(map_file) : parse_grid_map(maze_text());
    return std::make_unique<Maze>(std::move(map), seed);
  }
  throw std::invalid_argument("unknown discrete environment '" + id + "'");
}

std::unique_ptr<ContinuousEnvironment> make_continuous_environment(const std::string& id, std::uint64_t seed,
                                                                   std::uint64_t matrix_seed) {
  if (id == "linear") return std::make_unique<LinearModel>(matrix_seed, seed);
  if (id == "pendulum") return std::make_unique<InvertedPendulum>(seed);
  throw std::invalid_argument("unknown continuous environment '" + id + "'");
}

}  // namespace infind
