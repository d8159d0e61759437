#include "infind/continuous_inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <stdexcept>

namespace infind {

FittedQEntry fitted_q_belief(const Matrix& features, const Vector& q_values, const Vector& weights, double lambda) {
  const Eigen::Index n = features.rows();
  if (q_values.size() != n || weights.size() != n) {
    throw std::invalid_argument("fitted-Q inputs disagree in length");
  }
  if (n == 0) throw std::invalid_argument("fitted-Q needs at least one training state");
  const Eigen::Index f = features.cols();

  const Matrix weighted = weights.asDiagonal() * features;
  Matrix gram = features.transpose() * weighted;
  gram.diagonal().array() += lambda;
  FittedQEntry out;
  out.omega = gram.ldlt().solve(weighted.transpose() * q_values);
  if (!out.omega.allFinite()) {
    gram.diagonal().array() += 1e-8 * (1.0 + gram.trace() / static_cast<double>(f));
    out.omega = gram.colPivHouseholderQr().solve(weighted.transpose() * q_values);
  }

  const double total = weights.sum();
  const Vector w_hat = total > 0.0 ? Vector(weights / total) : Vector::Constant(n, 1.0 / static_cast<double>(n));
  const Vector fitted = features * out.omega;
  const double residual_var = w_hat.dot((q_values - fitted).array().square().matrix());
  out.sigma = std::sqrt(std::max(0.0, residual_var));
  out.mean = fitted.mean();
  out.variance = residual_var * w_hat.dot((q_values.array() - out.mean).square().matrix());
  return out;
}

FittedQBelief::FittedQBelief(std::vector<FittedQEntry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw std::invalid_argument("fitted-Q belief needs at least one action");
  for (const FittedQEntry& e : entries_) {
    if (e.omega.size() != entries_.front().omega.size()) {
      throw std::invalid_argument("fitted-Q entries disagree in feature dimension");
    }
  }
}

FittedQBelief FittedQBelief::zero(int n_actions, int feature_dim) {
  std::vector<FittedQEntry> entries(static_cast<std::size_t>(n_actions));
  for (FittedQEntry& e : entries) e.omega = Vector::Zero(feature_dim);
  return FittedQBelief(std::move(entries));
}

bool FittedQBelief::is_zero() const {
  for (const FittedQEntry& e : entries_) {
    if (!e.omega.isZero(0.0) || e.sigma != 0.0) return false;
  }
  return true;
}

Vector FittedQBelief::q_values(const Vector& phi) const {
  Vector q(n_actions());
  for (int a = 0; a < n_actions(); ++a) q(a) = phi.dot(entries_[static_cast<std::size_t>(a)].omega);
  return q;
}

int FittedQBelief::greedy_action(const Vector& phi) const {
  const Vector q = q_values(phi);
  int best = 0;
  for (int a = 1; a < q.size(); ++a) {
    if (q(a) > q(best)) best = a;
  }
  return best;
}

double FittedQBelief::mean_value(const Vector& phi) const { return q_values(phi).maxCoeff(); }

nlohmann::json FittedQBelief::to_json() const {
  nlohmann::json actions = nlohmann::json::array();
  for (const FittedQEntry& e : entries_) {
    actions.push_back({{"omega", matrix_to_json(e.omega)},
                       {"sigma", e.sigma},
                       {"mean", e.mean},
                       {"variance", e.variance}});
  }
  return {{"type", "fitted_q"}, {"actions", actions}};
}

FittedQBelief FittedQBelief::from_json(const nlohmann::json& doc) {
  std::vector<FittedQEntry> entries;
  for (const auto& item : doc.at("actions")) {
    FittedQEntry e;
    e.omega = matrix_from_json(item.at("omega")).col(0);
    e.sigma = item.at("sigma").get<double>();
    e.mean = item.at("mean").get<double>();
    e.variance = item.at("variance").get<double>();
    entries.push_back(std::move(e));
  }
  return FittedQBelief(std::move(entries));
}

namespace {

class StateProposal {
 public:
  StateProposal(std::span<const Vector> history, const Box& support, double history_fraction)
      : history_(history), support_(support), fraction_(history.empty() ? 0.0 : history_fraction) {}

  Vector draw(Rng& rng) const {
    if (fraction_ > 0.0 && unit_(rng) < fraction_) {
      std::uniform_int_distribution<std::size_t> pick(0, history_.size() - 1);
      return history_[pick(rng)];
    }
    return support_.sample(rng);
  }

 private:
  std::span<const Vector> history_;
  const Box& support_;
  double fraction_;
  mutable std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

// One value sample V^(k) drawn from a fitted-Q belief.
class ValueDraw {
 public:
  ValueDraw(const FittedQBelief& belief, const ContinuousModelSpec& model, Vector noise, double lower, double upper)
      : belief_(belief), model_(model), noise_(std::move(noise)), lower_(lower), upper_(upper) {}

  double at(const Vector& state) const {
    if (model_.is_terminal && model_.is_terminal(state)) return 0.0;
    const Vector phi = model_.features(state);
    const Vector q = belief_.q_values(phi);
    int a = 0;
    for (int b = 1; b < q.size(); ++b) {
      if (q(b) > q(a)) a = b;
    }
    return std::clamp(q(a) + noise_(a), lower_, upper_);
  }

 private:
  const FittedQBelief& belief_;
  const ContinuousModelSpec& model_;
  Vector noise_;
  double lower_;
  double upper_;
};

// Range of a discounted sum of `steps` rewards that may stop early at a
// terminal state.
std::pair<double, double> value_bounds(const ContinuousModelSpec& model, double discount, int steps) {
  if (!model.reward_bounds) {
    return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }
  const double g = (1.0 - std::pow(discount, steps)) / (1.0 - discount);
  return {std::min(0.0, model.reward_bounds->min * g), std::max(0.0, model.reward_bounds->max * g)};
}

Matrix draw_noise(const FittedQBelief& belief, int n, Rng& rng) {
  Matrix noise = standard_normal(belief.n_actions(), n, rng);
  for (int a = 0; a < belief.n_actions(); ++a) noise.row(a) *= std::sqrt(belief.entry(a).variance);
  return noise;
}

}  // namespace

ContinuousPlan bbi_plan_continuous(std::span<const LinearMdpSample> mdps, const ContinuousModelSpec& model,
                                   std::span<const Vector> history, const InductionConfig& config,
                                   LikelihoodScale& scale, Rng& rng) {
  config.validate();
  if (mdps.empty()) throw std::invalid_argument("no MDP samples");
  const int horizon = config.lookahead;
  const int n_mdps = static_cast<int>(mdps.size());
  const int n_values = config.n_value_samples;
  const int n_actions = model.n_actions;
  const int draws = config.n_next_value_samples;
  const StateProposal proposal(history, model.support, config.history_fraction);

  ContinuousPlan plan;
  plan.beliefs.assign(static_cast<std::size_t>(horizon), FittedQBelief::zero(n_actions, model.feature_dim));

  for (int i = horizon - 2; i >= 0; --i) {
    const double discount = mdps.front().discount;
    const auto [next_lo, next_hi] = value_bounds(model, discount, horizon - i - 1);
    const auto [boot_lo, boot_hi] = value_bounds(model, discount, std::max(0, horizon - i - 2));
    const FittedQBelief& next = plan.beliefs[static_cast<std::size_t>(i + 1)];
    const FittedQBelief& bootstrap =
        i + 2 < horizon ? plan.beliefs[static_cast<std::size_t>(i + 2)] : plan.beliefs.back();

    // Utilities at probe states under the incoming greedy policy.
    std::vector<Vector> probes;
    std::vector<Vector> probe_phi;
    for (int m = 0; m < config.n_probe_states; ++m) {
      probes.push_back(proposal.draw(rng));
      probe_phi.push_back(model.features(probes.back()));
    }
    const int n_probe = config.n_probe_states * draws;
    Matrix utilities(n_mdps, n_probe);
    for (int d = 0; d < draws; ++d) {
      const ValueDraw v_boot(bootstrap, model, draw_noise(bootstrap, 1, rng).col(0), boot_lo, boot_hi);
      for (int m = 0; m < config.n_probe_states; ++m) {
        const Vector& phi = probe_phi[static_cast<std::size_t>(m)];
        const int a = next.greedy_action(phi);
        for (int j = 0; j < n_mdps; ++j) {
          const LinearMdpSample& mdp = mdps[static_cast<std::size_t>(j)];
          const Vector s2 = model.next_from_target(probes[static_cast<std::size_t>(m)], mdp.sample_next(phi, a, rng));
          utilities(j, d * config.n_probe_states + m) = mdp.mean_reward(phi, a) + mdp.discount * v_boot.at(s2);
        }
      }
    }

    auto probe_values_for = [&](const Matrix& noise) {
      Matrix pv(n_probe, n_values);
      for (int k = 0; k < n_values; ++k) {
        const ValueDraw v(next, model, noise.col(k), next_lo, next_hi);
        for (int m = 0; m < config.n_probe_states; ++m) {
          const double value = v.at(probes[static_cast<std::size_t>(m)]);
          for (int d = 0; d < draws; ++d) pv(d * config.n_probe_states + m, k) = value;
        }
      }
      return pv;
    };

    Matrix noise = draw_noise(next, n_values, rng);
    Matrix weights;
    if (config.weight_mode == WeightMode::kMeanField) {
      weights = uniform_weights(n_mdps, n_values);
    } else {
      for (int attempt = 0;; ++attempt) {
        WeightResult w = compute_weights(probe_values_for(noise), utilities, scale.sigma_sq());
        if (!w.underflow || attempt > config.max_sigma_doublings) {
          weights = std::move(w.weights);
          break;
        }
        if (attempt > 0) scale.double_sigma();
        noise = draw_noise(next, n_values, rng);
      }
    }

    // Training targets: one proposal state per (j, k), every action.
    const int n_train = n_mdps * n_values;
    Matrix train_phi(n_train, model.feature_dim);
    Matrix targets(n_train, n_actions);
    Vector train_w(n_train);
    for (int j = 0; j < n_mdps; ++j) {
      const LinearMdpSample& mdp = mdps[static_cast<std::size_t>(j)];
      for (int k = 0; k < n_values; ++k) {
        const int row = j * n_values + k;
        const ValueDraw v(next, model, noise.col(k), next_lo, next_hi);
        const Vector state = proposal.draw(rng);
        const Vector phi = model.features(state);
        train_phi.row(row) = phi.transpose();
        train_w(row) = weights(j, k);
        for (int a = 0; a < n_actions; ++a) {
          const Vector s2 = model.next_from_target(state, mdp.sample_next(phi, a, rng));
          targets(row, a) = mdp.mean_reward(phi, a) + mdp.discount * v.at(s2);
        }
      }
    }
    std::vector<FittedQEntry> entries;
    entries.reserve(static_cast<std::size_t>(n_actions));
    for (int a = 0; a < n_actions; ++a) {
      entries.push_back(fitted_q_belief(train_phi, targets.col(a), train_w, config.ridge_lambda));
    }
    plan.beliefs[static_cast<std::size_t>(i)] = FittedQBelief(std::move(entries));
  }
  return plan;
}

ContinuousPlan bbi_plan_continuous(const BayesLinRegPosterior& posterior, const ContinuousModelSpec& model,
                                   std::span<const Vector> history, const InductionConfig& config,
                                   LikelihoodScale& scale, Rng& rng) {
  config.validate();
  const std::vector<LinearMdpSample> mdps = posterior.sample_mdps(config.n_mdp_samples, rng, config.reward_sampling);
  return bbi_plan_continuous(mdps, model, history, config, scale, rng);
}

}  // namespace infind
