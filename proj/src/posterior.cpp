#include "infind/posterior.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace infind {

using nlohmann::json;

// ---------------------------------------------------------------- Normal-Gamma

NormalGamma NormalGamma::updated(double reward) const {
  NormalGamma next;
  next.kappa = kappa + 1.0;
  next.mu = (kappa * mu + reward) / (kappa + 1.0);
  next.alpha = alpha + 0.5;
  next.beta = beta + kappa * (reward - mu) * (reward - mu) / (2.0 * (kappa + 1.0));
  return next;
}

double NormalGamma::sample_mean(Rng& rng) const {
  const double tau = sample_gamma(alpha, beta, rng);
  std::normal_distribution<double> normal(mu, 1.0 / std::sqrt(kappa * tau));
  return normal(rng);
}

double NormalGamma::log_density(double mean, double precision) const {
  if (!(precision > 0.0)) return -std::numeric_limits<double>::infinity();
  const double d = mean - mu;
  return 0.5 * std::log(kappa * precision / (2.0 * std::numbers::pi)) - 0.5 * kappa * precision * d * d +
         alpha * std::log(beta) - std::lgamma(alpha) + (alpha - 1.0) * std::log(precision) - beta * precision;
}

double dirichlet_log_density(const Vector& alpha, const Vector& p) {
  if (alpha.size() != p.size()) throw std::invalid_argument("dimension mismatch");
  double log_norm = std::lgamma(alpha.sum());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    log_norm -= std::lgamma(alpha[i]);
    acc += (alpha[i] - 1.0) * std::log(p[i]);
  }
  return log_norm + acc;
}

// ---------------------------------------------------------------- discrete posterior

DirichletNormalGammaPosterior::DirichletNormalGammaPosterior(int n_states, int n_actions, double discount,
                                                             double alpha0, NormalGamma reward_prior)
    : n_states_(n_states), n_actions_(n_actions), discount_(discount) {
  if (n_states < 1 || n_actions < 1) throw std::invalid_argument("posterior needs states and actions");
  if (!(alpha0 > 0.0)) throw std::invalid_argument("Dirichlet prior parameter must be positive");
  if (!(reward_prior.kappa > 0.0 && reward_prior.alpha > 0.0 && reward_prior.beta > 0.0)) {
    throw std::invalid_argument("Normal-Gamma parameters kappa, alpha, beta must be positive");
  }
  if (!(discount >= 0.0 && discount < 1.0)) throw std::invalid_argument("discount must lie in [0, 1)");
  counts_.assign(static_cast<std::size_t>(n_actions), Matrix::Constant(n_states, n_states, alpha0));
  rewards_.assign(static_cast<std::size_t>(n_states * n_actions), reward_prior);
  visits_.assign(static_cast<std::size_t>(n_states * n_actions), 0);
}

void DirichletNormalGammaPosterior::update(const Observation& obs) {
  if (obs.state < 0 || obs.state >= n_states_ || obs.next_state < 0 || obs.next_state >= n_states_ ||
      obs.action < 0 || obs.action >= n_actions_) {
    throw std::out_of_range("observation index out of range");
  }
  if (!std::isfinite(obs.reward)) throw std::invalid_argument("reward must be finite");
  counts_[static_cast<std::size_t>(obs.action)](obs.state, obs.next_state) += 1.0;
  const auto idx = static_cast<std::size_t>(obs.state * n_actions_ + obs.action);
  rewards_[idx] = rewards_[idx].updated(obs.reward);
  ++visits_[idx];
  ++total_observations_;
}

DiscreteMdp DirichletNormalGammaPosterior::sample_mdp(Rng& rng, RewardSampling rewards) const {
  std::vector<Matrix> p(static_cast<std::size_t>(n_actions_), Matrix(n_states_, n_states_));
  Matrix r(n_states_, n_actions_);
  for (int s = 0; s < n_states_; ++s) {
    for (int a = 0; a < n_actions_; ++a) {
      const auto ai = static_cast<std::size_t>(a);
      p[ai].row(s) = sample_dirichlet(counts_[ai].row(s).transpose(), rng).transpose();
      const NormalGamma& ng = reward_params(s, a);
      r(s, a) = rewards == RewardSampling::kSampled ? ng.sample_mean(rng) : ng.mu;
    }
  }
  return DiscreteMdp(std::move(p), std::move(r), discount_);
}

std::vector<DiscreteMdp> DirichletNormalGammaPosterior::sample_mdps(int count, Rng& rng,
                                                                    RewardSampling rewards) const {
  std::vector<DiscreteMdp> mdps;
  mdps.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) mdps.push_back(sample_mdp(rng, rewards));
  return mdps;
}

DiscreteMdp DirichletNormalGammaPosterior::mean_mdp() const {
  std::vector<Matrix> p;
  p.reserve(counts_.size());
  for (const Matrix& c : counts_) {
    Vector totals = c.rowwise().sum();
    p.push_back(totals.cwiseInverse().asDiagonal() * c);
  }
  Matrix r(n_states_, n_actions_);
  for (int s = 0; s < n_states_; ++s) {
    for (int a = 0; a < n_actions_; ++a) r(s, a) = reward_params(s, a).mu;
  }
  return DiscreteMdp(std::move(p), std::move(r), discount_);
}

double DirichletNormalGammaPosterior::transition_log_density(int state, int action, const Vector& row) const {
  return dirichlet_log_density(counts_.at(static_cast<std::size_t>(action)).row(state).transpose(), row);
}

json DirichletNormalGammaPosterior::to_json() const {
  json doc;
  doc["type"] = "dirichlet_normal_gamma";
  doc["n_states"] = n_states_;
  doc["n_actions"] = n_actions_;
  doc["discount"] = discount_;
  doc["total_observations"] = total_observations_;
  json counts = json::array();
  for (const Matrix& c : counts_) counts.push_back(matrix_to_json(c));
  doc["counts"] = std::move(counts);
  json rewards = json::array();
  for (std::size_t i = 0; i < rewards_.size(); ++i) {
    const NormalGamma& ng = rewards_[i];
    rewards.push_back({{"mu", ng.mu}, {"kappa", ng.kappa}, {"alpha", ng.alpha}, {"beta", ng.beta}, {"visits", visits_[i]}});
  }
  doc["rewards"] = std::move(rewards);
  return doc;
}

DirichletNormalGammaPosterior DirichletNormalGammaPosterior::from_json(const json& doc) {
  if (doc.at("type").get<std::string>() != "dirichlet_normal_gamma") {
    throw std::invalid_argument("not a Dirichlet/Normal-Gamma posterior document");
  }
  DirichletNormalGammaPosterior post(doc.at("n_states").get<int>(), doc.at("n_actions").get<int>(),
                                     doc.at("discount").get<double>());
  const json& counts = doc.at("counts");
  if (counts.size() != static_cast<std::size_t>(post.n_actions_)) throw std::invalid_argument("counts size mismatch");
  for (std::size_t a = 0; a < counts.size(); ++a) {
    Matrix c = matrix_from_json(counts[a]);
    if (c.rows() != post.n_states_ || c.cols() != post.n_states_ || !(c.array() > 0.0).all()) {
      throw std::invalid_argument("invalid count matrix");
    }
    post.counts_[a] = std::move(c);
  }
  const json& rewards = doc.at("rewards");
  if (rewards.size() != post.rewards_.size()) throw std::invalid_argument("reward table size mismatch");
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    const json& r = rewards[i];
    post.rewards_[i] = {r.at("mu").get<double>(), r.at("kappa").get<double>(), r.at("alpha").get<double>(),
                        r.at("beta").get<double>()};
    post.visits_[i] = r.at("visits").get<long>();
  }
  post.total_observations_ = doc.at("total_observations").get<long>();
  return post;
}

bool operator==(const DirichletNormalGammaPosterior& a, const DirichletNormalGammaPosterior& b) {
  if (a.n_states_ != b.n_states_ || a.n_actions_ != b.n_actions_ || a.discount_ != b.discount_) return false;
  for (std::size_t i = 0; i < a.counts_.size(); ++i) {
    if (a.counts_[i] != b.counts_[i]) return false;
  }
  return a.rewards_ == b.rewards_ && a.visits_ == b.visits_ && a.total_observations_ == b.total_observations_;
}

// ---------------------------------------------------------------- continuous posterior

Vector LinearMdpSample::mean_next(const Vector& phi, int action) const {
  return transition_coef[static_cast<std::size_t>(action)].transpose() * phi;
}

Vector LinearMdpSample::sample_next(const Vector& phi, int action, Rng& rng) const {
  const auto a = static_cast<std::size_t>(action);
  return mean_next(phi, action) + noise_chol[a] * standard_normal(noise_chol[a].rows(), rng);
}

double LinearMdpSample::mean_reward(const Vector& phi, int action) const {
  return reward_coef[static_cast<std::size_t>(action)].dot(phi);
}

BayesLinRegPosterior::BayesLinRegPosterior(int feature_dim, int state_dim, int n_actions, double discount,
                                           LinRegPrior prior)
    : feature_dim_(feature_dim), state_dim_(state_dim), n_actions_(n_actions), discount_(discount), prior_(prior) {
  if (feature_dim < 1 || state_dim < 1 || n_actions < 1) throw std::invalid_argument("invalid regression sizes");
  if (prior_.dof <= 0.0) prior_.dof = static_cast<double>(state_dim);
  if (!(prior_.coef_precision > 0.0 && prior_.scale > 0.0 && prior_.reward_coef_precision > 0.0 &&
        prior_.noise_shape > 0.0 && prior_.noise_rate > 0.0)) {
    throw std::invalid_argument("regression prior parameters must be positive");
  }
  if (prior_.dof < static_cast<double>(state_dim)) throw std::invalid_argument("dof must be at least the dimension");
  Stats empty{Matrix::Zero(feature_dim, feature_dim), Matrix::Zero(feature_dim, state_dim),
              Matrix::Zero(state_dim, state_dim), Vector::Zero(feature_dim), 0.0, 0};
  stats_.assign(static_cast<std::size_t>(n_actions), empty);
}

void BayesLinRegPosterior::update(int action, const Vector& features, double reward, const Vector& next_state) {
  if (action < 0 || action >= n_actions_) throw std::out_of_range("action index out of range");
  if (features.size() != feature_dim_ || next_state.size() != state_dim_) {
    throw std::invalid_argument("observation has wrong dimension");
  }
  if (!features.allFinite() || !next_state.allFinite() || !std::isfinite(reward)) {
    throw std::invalid_argument("observation must be finite");
  }
  Stats& s = stats_[static_cast<std::size_t>(action)];
  s.xtx.noalias() += features * features.transpose();
  s.xty.noalias() += features * next_state.transpose();
  s.yty.noalias() += next_state * next_state.transpose();
  s.xtr += reward * features;
  s.rtr += reward * reward;
  ++s.count;
}

TransitionPosterior BayesLinRegPosterior::transition_params(int action) const {
  const Stats& s = stats_.at(static_cast<std::size_t>(action));
  TransitionPosterior post;
  post.precision = s.xtx;
  post.precision.diagonal().array() += prior_.coef_precision;
  Eigen::LLT<Matrix> llt(post.precision);
  post.mean = llt.solve(s.xty);
  Matrix scale = Matrix::Identity(state_dim_, state_dim_) * prior_.scale + s.yty - post.mean.transpose() * s.xty;
  post.scale = 0.5 * (scale + scale.transpose());
  post.dof = prior_.dof + static_cast<double>(s.count);
  return post;
}

RewardPosterior BayesLinRegPosterior::reward_params(int action) const {
  const Stats& s = stats_.at(static_cast<std::size_t>(action));
  RewardPosterior post;
  post.precision = s.xtx;
  post.precision.diagonal().array() += prior_.reward_coef_precision;
  Eigen::LLT<Matrix> llt(post.precision);
  post.mean = llt.solve(s.xtr);
  post.shape = prior_.noise_shape + 0.5 * static_cast<double>(s.count);
  post.rate = prior_.noise_rate + 0.5 * std::max(0.0, s.rtr - post.mean.dot(s.xtr));
  return post;
}

LinearMdpSample BayesLinRegPosterior::sample(Rng& rng, RewardSampling rewards) const {
  LinearMdpSample out;
  out.discount = discount_;
  for (int a = 0; a < n_actions_; ++a) {
    const TransitionPosterior tp = transition_params(a);
    Matrix sigma = sample_inverse_wishart(tp.scale, tp.dof, rng);
    Matrix sigma_chol = cholesky_with_jitter(sigma);
    Matrix prec_chol = cholesky_with_jitter(tp.precision);
    // B = M + L^{-T} Z chol(Sigma)^T has row covariance precision^{-1} and column covariance Sigma.
    Matrix z = standard_normal(feature_dim_, state_dim_, rng);
    Matrix coef = tp.mean + prec_chol.transpose().triangularView<Eigen::Upper>().solve(z * sigma_chol.transpose());
    out.transition_coef.push_back(std::move(coef));
    out.noise_cov.push_back(std::move(sigma));
    out.noise_chol.push_back(std::move(sigma_chol));

    const RewardPosterior rp = reward_params(a);
    if (rewards == RewardSampling::kSampled) {
      const double noise_var = 1.0 / sample_gamma(rp.shape, rp.rate, rng);
      Matrix rchol = cholesky_with_jitter(rp.precision);
      Vector beta = rp.mean + std::sqrt(noise_var) *
                                  rchol.transpose().triangularView<Eigen::Upper>().solve(standard_normal(feature_dim_, rng));
      out.reward_coef.push_back(std::move(beta));
      out.reward_noise_var.push_back(noise_var);
    } else {
      out.reward_coef.push_back(rp.mean);
      out.reward_noise_var.push_back(rp.rate / std::max(rp.shape - 1.0, 1e-12));
    }
  }
  return out;
}

std::vector<LinearMdpSample> BayesLinRegPosterior::sample_mdps(int count, Rng& rng, RewardSampling rewards) const {
  std::vector<LinearMdpSample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) out.push_back(sample(rng, rewards));
  return out;
}

json BayesLinRegPosterior::to_json() const {
  json doc;
  doc["type"] = "bayes_linear_regression";
  doc["feature_dim"] = feature_dim_;
  doc["state_dim"] = state_dim_;
  doc["n_actions"] = n_actions_;
  doc["discount"] = discount_;
  doc["prior"] = {{"coef_precision", prior_.coef_precision}, {"scale", prior_.scale}, {"dof", prior_.dof},
                  {"reward_coef_precision", prior_.reward_coef_precision}, {"noise_shape", prior_.noise_shape},
                  {"noise_rate", prior_.noise_rate}};
  json actions = json::array();
  for (const Stats& s : stats_) {
    actions.push_back({{"xtx", matrix_to_json(s.xtx)}, {"xty", matrix_to_json(s.xty)}, {"yty", matrix_to_json(s.yty)},
                       {"xtr", matrix_to_json(s.xtr)}, {"rtr", s.rtr}, {"count", s.count}});
  }
  doc["actions"] = std::move(actions);
  return doc;
}

BayesLinRegPosterior BayesLinRegPosterior::from_json(const json& doc) {
  if (doc.at("type").get<std::string>() != "bayes_linear_regression") {
    throw std::invalid_argument("not a Bayesian linear regression posterior document");
  }
  const json& p = doc.at("prior");
  LinRegPrior prior{p.at("coef_precision").get<double>(), p.at("scale").get<double>(), p.at("dof").get<double>(),
                    p.at("reward_coef_precision").get<double>(), p.at("noise_shape").get<double>(),
                    p.at("noise_rate").get<double>()};
  BayesLinRegPosterior post(doc.at("feature_dim").get<int>(), doc.at("state_dim").get<int>(),
                            doc.at("n_actions").get<int>(), doc.at("discount").get<double>(), prior);
  const json& actions = doc.at("actions");
  if (actions.size() != post.stats_.size()) throw std::invalid_argument("action count mismatch");
  for (std::size_t a = 0; a < actions.size(); ++a) {
    const json& s = actions[a];
    Stats& st = post.stats_[a];
    st.xtx = matrix_from_json(s.at("xtx"));
    st.xty = matrix_from_json(s.at("xty"));
    st.yty = matrix_from_json(s.at("yty"));
    st.xtr = matrix_from_json(s.at("xtr"));
    st.rtr = s.at("rtr").get<double>();
    st.count = s.at("count").get<long>();
  }
  return post;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& doc) {
  const auto rows = static_cast<Eigen::Index>(doc.size());
  const auto cols = rows > 0 ? static_cast<Eigen::Index>(doc[0].size()) : 0;
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(doc[static_cast<std::size_t>(r)].size()) != cols) {
      throw std::invalid_argument("ragged matrix document");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = doc[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

}  // namespace infind
