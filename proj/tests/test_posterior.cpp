#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "infind/environments.hpp"
#include "infind/metrics.hpp"
#include "infind/posterior.hpp"

using namespace infind;

namespace {

double relative_error(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Gaussian likelihood of a reward sample given (mean, precision).
double gaussian_log_likelihood(double r, double mean, double precision) {
  return 0.5 * std::log(precision / (2.0 * std::numbers::pi)) - 0.5 * precision * (r - mean) * (r - mean);
}

}  // namespace

// ----------------------------------------------------------------- prior

TEST(DiscretePosterior, PriorHasUniformCounts) {
  DirichletNormalGammaPosterior post(5, 2, 0.99);
  for (int a = 0; a < 2; ++a) EXPECT_EQ(post.counts(a), Matrix::Constant(5, 5, 0.5));
  for (int s = 0; s < 5; ++s)
    for (int a = 0; a < 2; ++a) EXPECT_EQ(post.reward_params(s, a), (NormalGamma{0.0, 1.0, 1.0, 1.0}));
  DiscreteMdp mean = post.mean_mdp();
  for (int a = 0; a < 2; ++a) EXPECT_LT((mean.transition(a) - Matrix::Constant(5, 5, 0.2)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(mean.reward_mean(), Matrix::Zero(5, 2));
}

TEST(DiscretePosterior, RejectsInvalidPrior) {
  EXPECT_THROW(DirichletNormalGammaPosterior(3, 2, 0.9, 0.0), std::invalid_argument);
  EXPECT_THROW(DirichletNormalGammaPosterior(3, 2, 0.9, 0.5, NormalGamma{0.0, 0.0, 1.0, 1.0}), std::invalid_argument);
}

// ----------------------------------------------------------------- update

TEST(DiscretePosterior, SingleObservationRaisesOneCount) {
  DirichletNormalGammaPosterior post(4, 2, 0.9);
  post.update({1, 1, 0.0, 3});
  for (int a = 0; a < 2; ++a) {
    for (int s = 0; s < 4; ++s) {
      for (int t = 0; t < 4; ++t) {
        const double expected = (a == 1 && s == 1 && t == 3) ? 1.5 : 0.5;
        EXPECT_EQ(post.count(s, a, t), expected);
      }
    }
  }
  EXPECT_EQ(post.visits(1, 1), 1);
}

TEST(DiscretePosterior, NormalGammaUpdateAfterOneReward) {
  NormalGamma ng = NormalGamma{0.0, 1.0, 1.0, 1.0}.updated(1.0);
  EXPECT_DOUBLE_EQ(ng.mu, 0.5);
  EXPECT_DOUBLE_EQ(ng.kappa, 2.0);
  EXPECT_DOUBLE_EQ(ng.alpha, 1.5);
  EXPECT_DOUBLE_EQ(ng.beta, 1.25);
}

TEST(DiscretePosterior, OutOfRangeObservationThrows) {
  DirichletNormalGammaPosterior post(3, 2, 0.9);
  EXPECT_THROW(post.update({3, 0, 0.0, 0}), std::out_of_range);
  EXPECT_THROW(post.update({0, 2, 0.0, 0}), std::out_of_range);
  EXPECT_THROW(post.update({0, 0, 0.0, -1}), std::out_of_range);
}

TEST(DiscretePosterior, UpdateOrderIndependence) {
  Rng rng = make_rng(3);
  std::uniform_int_distribution<int> st(0, 3);
  std::uniform_int_distribution<int> ac(0, 1);
  std::normal_distribution<double> rw(1.0, 2.0);
  std::vector<Observation> obs;
  for (int i = 0; i < 200; ++i) obs.push_back({st(rng), ac(rng), rw(rng), st(rng)});

  DirichletNormalGammaPosterior forward(4, 2, 0.9);
  for (const Observation& o : obs) forward.update(o);
  std::shuffle(obs.begin(), obs.end(), rng);
  DirichletNormalGammaPosterior shuffled(4, 2, 0.9);
  for (const Observation& o : obs) shuffled.update(o);

  for (int a = 0; a < 2; ++a) EXPECT_EQ(forward.counts(a), shuffled.counts(a));
  for (int s = 0; s < 4; ++s) {
    for (int a = 0; a < 2; ++a) {
      const NormalGamma& x = forward.reward_params(s, a);
      const NormalGamma& y = shuffled.reward_params(s, a);
      EXPECT_NEAR(x.mu, y.mu, 1e-10);
      EXPECT_NEAR(x.kappa, y.kappa, 1e-10);
      EXPECT_NEAR(x.alpha, y.alpha, 1e-10);
      EXPECT_NEAR(x.beta, y.beta, 1e-10 * std::max(1.0, x.beta));
    }
  }
}

TEST(DiscretePosterior, CountsConservation) {
  NChain env(8);
  DirichletNormalGammaPosterior post(5, 2, 0.99);
  Rng rng = make_rng(8);
  std::uniform_int_distribution<int> pick(0, 1);
  int s = env.reset();
  for (int t = 0; t < 1000; ++t) {
    const int a = pick(rng);
    DiscreteStep step = env.step(a);
    post.update({s, a, step.reward, step.next_state});
    s = step.next_state;
  }
  for (int st = 0; st < 5; ++st)
    for (int a = 0; a < 2; ++a) EXPECT_DOUBLE_EQ(post.counts(a).row(st).sum(), 2.5 + post.visits(st, a));
  EXPECT_EQ(post.total_observations(), 1000);
}

// ----------------------------------------------------------------- sampling

TEST(DiscretePosterior, ConcentratedRowsSampleNearVertex) {
  DirichletNormalGammaPosterior post(3, 1, 0.9, 1.0);
  for (int i = 0; i < 1000000; ++i) post.update({0, 0, 0.0, 0});
  Rng rng = make_rng(4);
  int near_vertex = 0;
  const int draws = 2000;
  for (int i = 0; i < draws; ++i) {
    if (post.sample_mdp(rng).transition(0, 0, 0) > 0.99) ++near_vertex;
  }
  EXPECT_GT(static_cast<double>(near_vertex) / draws, 0.99);
}

TEST(DiscretePosterior, SampledRowMeanMatchesNormalizedCounts) {
  DirichletNormalGammaPosterior post(3, 1, 0.9);
  post.update({0, 0, 0.0, 0});
  post.update({0, 0, 0.0, 0});
  post.update({0, 0, 0.0, 2});
  Rng rng = make_rng(5);
  const int draws = 10000;
  Matrix rows(draws, 3);
  for (int i = 0; i < draws; ++i) rows.row(i) = post.sample_mdp(rng).transition(0).row(0);
  const Vector alpha = post.counts(0).row(0).transpose();
  const Vector expected = alpha / alpha.sum();
  for (int k = 0; k < 3; ++k) {
    const Vector col = rows.col(k);
    std::vector<double> values(col.data(), col.data() + draws);
    SampleSummary sum = summarize(values);
    EXPECT_LT(std::abs(sum.mean - expected[k]), 3.0 * sum.standard_error) << "coordinate " << k;
  }
}

TEST(DiscretePosterior, SymmetricCountsGiveExchangeableRows) {
  DirichletNormalGammaPosterior post(4, 1, 0.9, 0.7);
  Rng rng = make_rng(6);
  const int draws = 10000;
  std::vector<std::vector<double>> coords(4);
  for (int i = 0; i < draws; ++i) {
    DiscreteMdp m = post.sample_mdp(rng);
    for (int k = 0; k < 4; ++k) coords[static_cast<std::size_t>(k)].push_back(m.transition(2, 0, k));
  }
  SampleSummary first = summarize(coords[0]);
  for (int k = 1; k < 4; ++k) {
    SampleSummary other = summarize(coords[static_cast<std::size_t>(k)]);
    const double se = std::hypot(first.standard_error, other.standard_error);
    EXPECT_LT(std::abs(first.mean - other.mean), 3.0 * se);
  }
}

TEST(DiscretePosterior, SampledMdpsAreValid) {
  DirichletNormalGammaPosterior post(6, 3, 0.95, 0.01);
  Rng rng = make_rng(7);
  for (const DiscreteMdp& m : post.sample_mdps(200, rng)) {
    for (int a = 0; a < 3; ++a) {
      EXPECT_GE(m.transition(a).minCoeff(), 0.0);
      EXPECT_LT((m.transition(a).rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-9);
    }
    EXPECT_TRUE(m.reward_mean().allFinite());
  }
}

TEST(DiscretePosterior, MeanOfSamplesMatchesMeanMdp) {
  NChain env(2);
  DirichletNormalGammaPosterior post(5, 2, 0.99);
  Rng act = make_rng(2, 1);
  std::uniform_int_distribution<int> pick(0, 1);
  int s = env.reset();
  for (int t = 0; t < 300; ++t) {
    const int a = pick(act);
    DiscreteStep step = env.step(a);
    post.update({s, a, step.reward, step.next_state});
    s = step.next_state;
  }
  DiscreteMdp mean = post.mean_mdp();
  Rng rng = make_rng(2, 2);
  const int draws = 10000;
  std::vector<double> p01;
  std::vector<double> r01;
  for (int i = 0; i < draws; ++i) {
    DiscreteMdp m = post.sample_mdp(rng);
    p01.push_back(m.transition(0, 1, 1));
    r01.push_back(m.reward(0, 1));
  }
  SampleSummary ps = summarize(p01);
  EXPECT_LT(std::abs(ps.mean - mean.transition(0, 1, 1)), 3.0 * ps.standard_error);
  SampleSummary rs = summarize(r01);
  EXPECT_LT(std::abs(rs.mean - mean.reward(0, 1)), 3.0 * rs.standard_error);
}

TEST(DiscretePosterior, MeanMdpConvergesToTruthUnderExploration) {
  NChain env(10);
  DiscreteMdp truth = env.as_mdp(0.99);
  DirichletNormalGammaPosterior post(5, 2, 0.99);
  Rng act = make_rng(10, 1);
  std::uniform_int_distribution<int> pick(0, 1);
  int s = env.reset();
  for (long t = 0; t < 1000000; ++t) {
    const int a = pick(act);
    DiscreteStep step = env.step(a);
    post.update({s, a, step.reward, step.next_state});
    s = step.next_state;
  }
  DiscreteMdp mean = post.mean_mdp();
  for (int a = 0; a < 2; ++a) EXPECT_LT((mean.transition(a) - truth.transition(a)).cwiseAbs().maxCoeff(), 0.01);
}

TEST(DiscretePosterior, KernelConcentratesWithData) {
  // W1 between a sampled row and the true row, averaged over seeds.
  NChain env(0);
  DiscreteMdp truth = env.as_mdp(0.99);
  auto distance_after = [&](int observations, std::uint64_t seed) {
    NChain sim(seed);
    DirichletNormalGammaPosterior post(5, 2, 0.99);
    Rng act = make_rng(seed, 1);
    std::uniform_int_distribution<int> pick(0, 1);
    int s = sim.reset();
    for (int t = 0; t < observations; ++t) {
      const int a = pick(act);
      DiscreteStep step = sim.step(a);
      post.update({s, a, step.reward, step.next_state});
      s = step.next_state;
    }
    Rng rng = make_rng(seed, 2);
    double total = 0.0;
    for (int i = 0; i < 50; ++i) {
      DiscreteMdp m = post.sample_mdp(rng);
      total += (m.transition(0) - truth.transition(0)).cwiseAbs().sum();
    }
    return total / 50.0;
  };
  double small = 0.0;
  double large = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    small += distance_after(10, seed);
    large += distance_after(1000, seed);
  }
  EXPECT_LT(large, small);
}

// ----------------------------------------------------------------- conjugacy

TEST(Conjugacy, ZeroObservationsLeavePriorUnchanged) {
  DirichletNormalGammaPosterior post(1, 1, 0.9);
  EXPECT_EQ(post.counts(0)(0, 0), 0.5);
  EXPECT_EQ(post.reward_params(0, 0), (NormalGamma{0.0, 1.0, 1.0, 1.0}));
}

TEST(Conjugacy, BetaPosteriorMatchesGridBayes) {
  // One state, two successors; five transitions (3 to state 0, 2 to state 1).
  DirichletNormalGammaPosterior post(2, 1, 0.9);
  for (int next : {0, 1, 0, 0, 1}) post.update({0, 0, 0.0, next});

  const int grid = 200000;
  const double h = 1.0 / grid;
  std::vector<double> unnorm(static_cast<std::size_t>(grid));
  double z = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double p = (i + 0.5) * h;
    // Prior Beta(0.5, 0.5) up to a constant, times the likelihood p^3 (1-p)^2.
    const double value = std::pow(p, -0.5) * std::pow(1.0 - p, -0.5) * std::pow(p, 3) * std::pow(1.0 - p, 2);
    unnorm[static_cast<std::size_t>(i)] = value;
    z += value * h;
  }
  for (double p : {0.1, 0.3, 0.5, 0.62, 0.8, 0.9}) {
    const int i = static_cast<int>(p / h);
    const double pm = (i + 0.5) * h;
    const double grid_density = unnorm[static_cast<std::size_t>(i)] / z;
    Vector row(2);
    row << pm, 1.0 - pm;
    const double conjugate = std::exp(post.transition_log_density(0, 0, row));
    EXPECT_LT(relative_error(conjugate, grid_density), 1e-3) << "p=" << pm;
  }
}

TEST(Conjugacy, DirichletPosteriorMatchesGridBayesOnSimplex) {
  DirichletNormalGammaPosterior post(3, 1, 0.9);
  for (int next : {0, 1, 2, 0, 1}) post.update({0, 0, 0.0, next});

  // Midpoint rule on the 2-simplex in (p0, p1).
  const int grid = 1500;
  const double h = 1.0 / grid;
  double z = 0.0;
  auto unnorm = [](double p0, double p1) {
    const double p2 = 1.0 - p0 - p1;
    // Prior Dirichlet(0.5, 0.5, 0.5) times the multinomial likelihood p0^2 p1^2 p2.
    return std::pow(p0, 1.5) * std::pow(p1, 1.5) * std::pow(p2, 0.5);
  };
  for (int i = 0; i < grid; ++i) {
    for (int k = 0; k < grid - i; ++k) {
      const double p0 = (i + 0.5) * h;
      const double p1 = (k + 0.5) * h;
      if (p0 + p1 >= 1.0) continue;
      z += unnorm(p0, p1) * h * h;
    }
  }
  for (auto [p0, p1] : std::vector<std::pair<double, double>>{{0.3, 0.3}, {0.2, 0.5}, {0.45, 0.25}, {0.1, 0.1}}) {
    Vector row(3);
    row << p0, p1, 1.0 - p0 - p1;
    const double conjugate = std::exp(post.transition_log_density(0, 0, row));
    EXPECT_LT(relative_error(conjugate, unnorm(p0, p1) / z), 1e-3) << p0 << "," << p1;
  }
}

TEST(Conjugacy, NormalGammaMatchesGridBayes) {
  const NormalGamma prior{0.0, 1.0, 1.0, 1.0};
  const std::vector<double> rewards{0.7, 1.9, -0.3, 1.2, 0.4};
  NormalGamma post = prior;
  for (double r : rewards) post = post.updated(r);

  const double mean_lo = -4.0;
  const double mean_hi = 5.0;
  const double prec_hi = 12.0;
  const int nm = 1800;
  const int np = 2400;
  const double hm = (mean_hi - mean_lo) / nm;
  const double hp = prec_hi / np;
  auto log_unnorm = [&](double mean, double prec) {
    double lp = prior.log_density(mean, prec);
    for (double r : rewards) lp += gaussian_log_likelihood(r, mean, prec);
    return lp;
  };
  double z = 0.0;
  for (int i = 0; i < nm; ++i) {
    for (int k = 0; k < np; ++k) {
      z += std::exp(log_unnorm(mean_lo + (i + 0.5) * hm, (k + 0.5) * hp)) * hm * hp;
    }
  }
  for (auto [mean, prec] : std::vector<std::pair<double, double>>{{0.6, 1.0}, {0.0, 0.5}, {1.2, 2.0}, {0.4, 0.2}}) {
    const double grid_density = std::exp(log_unnorm(mean, prec)) / z;
    EXPECT_LT(relative_error(std::exp(post.log_density(mean, prec)), grid_density), 1e-3) << mean << "," << prec;
  }
}

// ----------------------------------------------------------------- serialization

TEST(DiscretePosterior, JsonRoundTripIsLossless) {
  DirichletNormalGammaPosterior post(4, 3, 0.97, 0.31);
  Rng rng = make_rng(9);
  std::normal_distribution<double> rw(0.1, 3.3);
  std::uniform_int_distribution<int> st(0, 3);
  std::uniform_int_distribution<int> ac(0, 2);
  for (int i = 0; i < 100; ++i) post.update({st(rng), ac(rng), rw(rng), st(rng)});
  const std::string text = post.to_json().dump();
  DirichletNormalGammaPosterior back = DirichletNormalGammaPosterior::from_json(nlohmann::json::parse(text));
  EXPECT_TRUE(back == post);
  EXPECT_EQ(back.to_json().dump(), text);
}

// ----------------------------------------------------------------- linear regression

namespace {

struct LinearFixture {
  Matrix coef;  // f x d
  Vector reward;
  double noise = 0.05;
};

BayesLinRegPosterior fit_linear(const LinearFixture& truth, int n, std::uint64_t seed) {
  const int f = static_cast<int>(truth.coef.rows());
  const int d = static_cast<int>(truth.coef.cols());
  BayesLinRegPosterior post(f, d, 1, 0.99);
  Rng rng = make_rng(seed);
  for (int i = 0; i < n; ++i) {
    Vector x = standard_normal(f, rng);
    Vector y = truth.coef.transpose() * x + truth.noise * standard_normal(d, rng);
    const double r = truth.reward.dot(x) + truth.noise * standard_normal(1, rng)[0];
    post.update(0, x, r, y);
  }
  return post;
}

LinearFixture make_fixture() {
  Rng rng = make_rng(77);
  return {standard_normal(3, 2, rng), standard_normal(3, rng), 0.05};
}

}  // namespace

TEST(LinRegPosterior, SampledCovarianceIsSymmetricPositiveDefinite) {
  BayesLinRegPosterior post = fit_linear(make_fixture(), 50, 1);
  Rng rng = make_rng(2);
  for (int i = 0; i < 100; ++i) {
    LinearMdpSample m = post.sample(rng);
    const Matrix& sigma = m.noise_cov[0];
    EXPECT_LT((sigma - sigma.transpose()).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, sigma.cwiseAbs().maxCoeff()));
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
    EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
    EXPECT_GT(m.reward_noise_var[0], 0.0);
  }
}

TEST(LinRegPosterior, PriorDegreesOfFreedomEqualStateDimension) {
  BayesLinRegPosterior post(10, 2, 3, 0.99);
  EXPECT_DOUBLE_EQ(post.transition_params(1).dof, 2.0);
  EXPECT_EQ(post.transition_params(0).scale, Matrix::Identity(2, 2) * 1e-3);
}

TEST(LinRegPosterior, CoefficientsConcentrateWithData) {
  const LinearFixture truth = make_fixture();
  auto mean_distance = [&](int n) {
    BayesLinRegPosterior post = fit_linear(truth, n, 3);
    Rng rng = make_rng(4);
    double total = 0.0;
    for (int i = 0; i < 50; ++i) total += (post.sample(rng).transition_coef[0] - truth.coef).norm();
    return total / 50.0;
  };
  const double d10 = mean_distance(10);
  const double d100 = mean_distance(100);
  const double d1000 = mean_distance(1000);
  EXPECT_LT(d100, d10);
  EXPECT_LT(d1000, d100);
  EXPECT_LT(d1000, 0.02);
}

TEST(LinRegPosterior, PosteriorMeanMatchesRidgeSolution) {
  const LinearFixture truth = make_fixture();
  BayesLinRegPosterior post = fit_linear(truth, 200, 5);
  // Rebuild the design independently with the same seed.
  Rng rng = make_rng(5);
  Matrix x(200, 3);
  Matrix y(200, 2);
  for (int i = 0; i < 200; ++i) {
    Vector xi = standard_normal(3, rng);
    Vector yi = truth.coef.transpose() * xi + truth.noise * standard_normal(2, rng);
    standard_normal(1, rng);
    x.row(i) = xi.transpose();
    y.row(i) = yi.transpose();
  }
  Matrix gram = x.transpose() * x + 1e-3 * Matrix::Identity(3, 3);
  Matrix expected = gram.fullPivLu().solve(x.transpose() * y);
  EXPECT_LT((post.transition_params(0).mean - expected).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(LinRegPosterior, JsonRoundTrip) {
  BayesLinRegPosterior post = fit_linear(make_fixture(), 20, 6);
  const std::string text = post.to_json().dump();
  BayesLinRegPosterior back = BayesLinRegPosterior::from_json(nlohmann::json::parse(text));
  EXPECT_EQ(back.to_json().dump(), text);
  EXPECT_EQ(back.transition_params(0).mean, post.transition_params(0).mean);
}

TEST(LinRegPosterior, RejectsBadObservations) {
  BayesLinRegPosterior post(3, 2, 2, 0.9);
  EXPECT_THROW(post.update(2, Vector::Zero(3), 0.0, Vector::Zero(2)), std::out_of_range);
  EXPECT_THROW(post.update(0, Vector::Zero(4), 0.0, Vector::Zero(2)), std::invalid_argument);
}
