#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "infind/grid_map.hpp"
#include "infind/mdp.hpp"
#include "infind/random.hpp"

namespace infind {

struct RewardRange {
  double min = 0.0;
  double max = 0.0;
  /// (max - min) / (1 - gamma): the widest possible spread of values.
  double value_span(double discount) const { return (max - min) / (1.0 - discount); }
};

/// One simulator transition. `terminal` marks an episode end; the simulator
/// has already reset itself when it is set.
template <typename State>
struct StepResult {
  State next_state;
  double reward = 0.0;
  bool terminal = false;
};

using DiscreteStep = StepResult<int>;
using ContinuousStep = StepResult<Vector>;

/// Seeded tabular simulator with an exact DiscreteMdp export. The exported
/// kernel models episode resets as ordinary transitions back to the start.
class DiscreteEnvironment {
 public:
  virtual ~DiscreteEnvironment() = default;

  virtual std::string name() const = 0;
  virtual int n_states() const = 0;
  virtual int n_actions() const = 0;
  virtual int start_state() const = 0;
  virtual RewardRange reward_range() const = 0;
  virtual DiscreteMdp as_mdp(double discount) const = 0;

  int state() const { return state_; }
  int reset() {
    state_ = start_state();
    return state_;
  }
  DiscreteStep step(int action);
  /// Places the simulator in `state` without an episode reset.
  void set_state(int state);

 protected:
  explicit DiscreteEnvironment(std::uint64_t seed) : rng_(make_rng(seed, 0x656e76)) {}
  /// Applies `action` from `state_`; returns the post-reset observation.
  virtual DiscreteStep transition(int action) = 0;

  Rng rng_;
  int state_ = 0;
};

/// Five-state chain; action 0 pays 2 and returns to state 0, action 1
/// advances (paying 10 while staying in the last state). With probability
/// `slip` the other action's full effect applies.
class NChain final : public DiscreteEnvironment {
 public:
  explicit NChain(std::uint64_t seed = 0, double slip = 0.2);

  std::string name() const override { return "nchain"; }
  int n_states() const override { return 5; }
  int n_actions() const override { return 2; }
  int start_state() const override { return 0; }
  RewardRange reward_range() const override { return {0.0, 10.0}; }
  DiscreteMdp as_mdp(double discount) const override;

  double slip() const { return slip_; }

 private:
  DiscreteStep transition(int action) override;
  double slip_;
};

/// Two deterministic 5-state loops sharing state 0. States 1-4 form the right
/// loop (either action advances, 1 paid on return to 0); states 5-8 form the
/// left loop (action 1 advances, 2 paid on return; action 0 resets to 0).
class DoubleLoop final : public DiscreteEnvironment {
 public:
  explicit DoubleLoop(std::uint64_t seed = 0);

  std::string name() const override { return "doubleloop"; }
  int n_states() const override { return 9; }
  int n_actions() const override { return 2; }
  int start_state() const override { return 0; }
  RewardRange reward_range() const override { return {0.0, 2.0}; }
  DiscreteMdp as_mdp(double discount) const override;

  /// Deterministic successor and reward.
  static std::pair<int, double> successor(int state, int action);

 private:
  DiscreteStep transition(int action) override;
};

/// Slippery grid: -1 per step, +50 on entering a goal, -50 on entering lava;
/// both end the episode. States are the non-wall cells.
class LavaLake final : public DiscreteEnvironment {
 public:
  LavaLake(GridMap map, std::uint64_t seed = 0);

  static LavaLake small(std::uint64_t seed = 0);
  static LavaLake large(std::uint64_t seed = 0);

  std::string name() const override { return "lavalake"; }
  int n_states() const override { return static_cast<int>(map_.locations().size()); }
  int n_actions() const override { return 4; }
  int start_state() const override { return map_.location_index(map_.start()); }
  RewardRange reward_range() const override { return {-50.0, 50.0}; }
  DiscreteMdp as_mdp(double discount) const override;

  const GridMap& map() const { return map_; }

 private:
  DiscreteStep transition(int action) override;
  /// (next state, reward, terminal) when the move actually taken is `dir`.
  DiscreteStep resolve(int state, Direction dir) const;
  GridMap map_;
};

/// Slippery grid with flags. State = location * 2^flags + collected-flag mask;
/// entering a goal pays one per collected flag and resets.
class Maze final : public DiscreteEnvironment {
 public:
  Maze(GridMap map, std::uint64_t seed = 0);
  static Maze standard(std::uint64_t seed = 0);

  std::string name() const override { return "maze"; }
  int n_states() const override { return n_locations() * n_masks(); }
  int n_actions() const override { return 4; }
  int start_state() const override { return encode(map_.location_index(map_.start()), 0); }
  RewardRange reward_range() const override { return {0.0, static_cast<double>(map_.flags().size())}; }
  DiscreteMdp as_mdp(double discount) const override;

  const GridMap& map() const { return map_; }
  int n_locations() const { return static_cast<int>(map_.locations().size()); }
  int n_masks() const { return 1 << map_.flags().size(); }
  int encode(int location, int mask) const { return location * n_masks() + mask; }
  int location_of(int state) const { return state / n_masks(); }
  int mask_of(int state) const { return state % n_masks(); }

 private:
  DiscreteStep transition(int action) override;
  DiscreteStep resolve(int state, Direction dir) const;
  GridMap map_;
};

/// Axis-aligned box used for probe-state sampling.
struct Box {
  Vector lower;
  Vector upper;
  Vector sample(Rng& rng) const;
};

/// What a continuous planner needs to know about an environment besides data.
struct ContinuousModelSpec {
  std::function<Vector(const Vector&)> features;
  /// States at which the continuation value is zero (failure regions).
  std::function<bool(const Vector&)> is_terminal;
  int feature_dim = 0;
  int state_dim = 0;
  int n_actions = 0;
  Box support;
  /// The transition model regresses s' - s instead of s'.
  bool increment_target = false;
  /// Exact per-step reward bounds, when the environment guarantees them.
  std::optional<RewardRange> reward_bounds;

  /// Regression target for an observed transition.
  Vector target(const Vector& state, const Vector& next_state) const {
    return increment_target ? Vector(next_state - state) : next_state;
  }
  /// Next state implied by a (sampled) regression target.
  Vector next_from_target(const Vector& state, const Vector& target) const {
    return increment_target ? Vector(state + target) : target;
  }
};

class ContinuousEnvironment {
 public:
  virtual ~ContinuousEnvironment() = default;

  virtual std::string name() const = 0;
  virtual int state_dim() const = 0;
  virtual int n_actions() const = 0;
  virtual int feature_dim() const = 0;
  virtual Vector features(const Vector& state) const = 0;
  virtual bool is_failure(const Vector& state) const = 0;
  /// Whether the dynamics model predicts increments s' - s.
  virtual bool models_increment() const { return false; }
  /// Whether reward_range() bounds every reward (not only typical ones).
  virtual bool rewards_bounded() const { return false; }
  virtual Box support() const = 0;
  virtual RewardRange reward_range() const = 0;

  const Vector& state() const { return state_; }
  int episode_step() const { return episode_step_; }
  virtual Vector reset() = 0;
  /// `next_state` is the state reached before any reset, so it can be used
  /// directly as regression data.
  virtual ContinuousStep step(int action) = 0;

  ContinuousModelSpec model_spec() const;

 protected:
  explicit ContinuousEnvironment(std::uint64_t seed) : rng_(make_rng(seed, 0x656e76)) {}
  Rng rng_;
  Vector state_;
  int episode_step_ = 0;
};

struct LinearModelOptions {
  int state_dim = 4;
  int n_actions = 11;
  double spectral_radius_cap = 0.95;
  double noise_std = 0.01;
  double reset_norm = 100.0;
  int max_episode_steps = 200;
  double start_halfwidth = 1.0;
  double support_halfwidth = 5.0;
};

/// s' = A_a s (+ noise), r = (A^R_a)^T s with matrices drawn once from
/// `matrix_seed`. Episodes end when |s|_inf exceeds reset_norm or after
/// max_episode_steps.
class LinearModel final : public ContinuousEnvironment {
 public:
  LinearModel(std::uint64_t matrix_seed, std::uint64_t seed, LinearModelOptions options = {});

  std::string name() const override { return "linear"; }
  int state_dim() const override { return options_.state_dim; }
  int n_actions() const override { return options_.n_actions; }
  int feature_dim() const override { return options_.state_dim; }
  Vector features(const Vector& state) const override { return state; }
  bool is_failure(const Vector&) const override { return false; }
  Box support() const override;
  RewardRange reward_range() const override;

  Vector reset() override;
  ContinuousStep step(int action) override;

  const Matrix& dynamics(int action) const { return dynamics_.at(static_cast<std::size_t>(action)); }
  const Vector& reward_weights(int action) const { return reward_weights_.at(static_cast<std::size_t>(action)); }
  /// Sets the current state directly (tests).
  void set_state(const Vector& s) { state_ = s; }

 private:
  LinearModelOptions options_;
  std::vector<Matrix> dynamics_;
  std::vector<Vector> reward_weights_;
};

/// Spectral radius via the eigenvalues of a square matrix.
double spectral_radius(const Matrix& m);

struct PendulumOptions {
  double gravity = 9.8;
  double pole_mass = 2.0;
  double cart_mass = 8.0;
  double pole_length = 0.5;
  double dt = 0.1;
  double force = 50.0;
  double force_noise = 10.0;
  int success_steps = 3000;
  double start_halfwidth = 0.01;
  double support_velocity = 3.0;
};

/// Cart-pole balancing with three force actions {-F, 0, +F} plus uniform
/// force noise. Failure (reward -1) when |theta| > pi/2; reward 0 otherwise.
/// An episode also ends successfully after success_steps steps.
class InvertedPendulum final : public ContinuousEnvironment {
 public:
  explicit InvertedPendulum(std::uint64_t seed = 0, PendulumOptions options = {});

  std::string name() const override { return "pendulum"; }
  int state_dim() const override { return 2; }
  int n_actions() const override { return 3; }
  int feature_dim() const override { return 10; }
  Vector features(const Vector& state) const override;
  bool is_failure(const Vector& state) const override;
  bool models_increment() const override { return true; }
  bool rewards_bounded() const override { return true; }
  Box support() const override;
  RewardRange reward_range() const override { return {-1.0, 0.0}; }

  Vector reset() override;
  ContinuousStep step(int action) override;

  /// One Euler step of the noise-free dynamics with force `u`.
  Vector dynamics(const Vector& state, double u) const;
  void set_state(const Vector& s) { state_ = s; }
  void set_noise_enabled(bool enabled) { noise_enabled_ = enabled; }
  const PendulumOptions& options() const { return options_; }

 private:
  PendulumOptions options_;
  bool noise_enabled_ = true;
};

/// Constant term plus nine Gaussian RBFs (sigma^2 = 1) centred on
/// theta in {-pi/4, 0, pi/4} x theta_dot in {-1, 0, 1}.
Vector pendulum_features(const Vector& state);

std::unique_ptr<DiscreteEnvironment> make_discrete_environment(const std::string& id, std::uint64_t seed,
                                                               const std::string& map_file = "");
std::unique_ptr<ContinuousEnvironment> make_continuous_environment(const std::string& id, std::uint64_t seed,
                                                                   std::uint64_t matrix_seed = 1);
bool is_discrete_environment(const std::string& id);
bool is_continuous_environment(const std::string& id);

}  // namespace infind
