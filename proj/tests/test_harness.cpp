#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "infind/experiment.hpp"

using namespace infind;

// ----------------------------------------------------------------- smoothing

TEST(Smoothing, ConstantSeriesIsFixed) {
  std::vector<double> x(50, 3.5);
  for (double y : exp_smooth(x, 7.0)) EXPECT_DOUBLE_EQ(y, 3.5);
}

TEST(Smoothing, ImpulseDecaysByHalfLife) {
  std::vector<double> x{1.0, 0.0, 0.0, 0.0};
  std::vector<double> y = exp_smooth(x, 1.0);
  EXPECT_DOUBLE_EQ(y[0], 1.0);
  EXPECT_DOUBLE_EQ(y[1], 0.5);
  EXPECT_DOUBLE_EQ(y[2], 0.25);
  EXPECT_DOUBLE_EQ(y[3], 0.125);
  std::vector<double> z = exp_smooth(std::vector<double>{0.0, 1.0, 0.0, 0.0, 0.0}, 2.0);
  // Mass 1 - lambda enters at t = 2 and halves every two steps after.
  const double lambda = std::pow(2.0, -0.5);
  EXPECT_NEAR(z[1], 1.0 - lambda, 1e-15);
  EXPECT_NEAR(z[3], 0.5 * (1.0 - lambda), 1e-15);
}

TEST(Smoothing, StaysWithinSeriesBounds) {
  Rng rng = make_rng(61);
  std::uniform_real_distribution<double> unif(-2.0, 5.0);
  std::vector<double> x(1000);
  for (double& v : x) v = unif(rng);
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  for (double y : exp_smooth(x, 30.0)) {
    EXPECT_GE(y, *lo);
    EXPECT_LE(y, *hi);
  }
}

TEST(Smoothing, ConvergesToIidMean) {
  Rng rng = make_rng(62);
  std::normal_distribution<double> normal(2.0, 1.0);
  std::vector<double> x(200000);
  for (double& v : x) v = normal(rng);
  const double h = 1000.0;
  const double lambda = std::pow(2.0, -1.0 / h);
  // Stationary variance of the smoother: (1 - lambda) / (1 + lambda).
  const double sd = std::sqrt((1.0 - lambda) / (1.0 + lambda));
  EXPECT_NEAR(exp_smooth(x, h).back(), 2.0, 3.0 * sd);
}

TEST(Smoothing, StreamingMatchesBatch) {
  std::vector<double> x{4.0, -1.0, 2.5, 0.0, 9.0};
  std::vector<double> batch = exp_smooth(x, 3.0);
  ExpSmoother s(3.0);
  EXPECT_TRUE(s.empty());
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_DOUBLE_EQ(s.push(x[i]), batch[i]);
  EXPECT_FALSE(s.empty());
}

// ----------------------------------------------------------------- Wasserstein

TEST(Wasserstein, IdenticalSetsAreZero) {
  std::vector<double> a{3.0, -1.0, 2.0, 2.0};
  std::vector<double> b{2.0, 3.0, 2.0, -1.0};
  EXPECT_DOUBLE_EQ(wasserstein_1d(a, b), 0.0);
}

TEST(Wasserstein, PointMassesDifferByShift) {
  EXPECT_DOUBLE_EQ(wasserstein_1d(std::vector<double>{0.0}, std::vector<double>{4.5}), 4.5);
  EXPECT_DOUBLE_EQ(wasserstein_1d(std::vector<double>{1.0, 1.0}, std::vector<double>{-2.0, -2.0}), 3.0);
}

TEST(Wasserstein, MatchesBruteForceAssignment) {
  Rng rng = make_rng(63);
  std::normal_distribution<double> normal(0.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(7);
    std::vector<double> b(7);
    for (double& v : a) v = normal(rng);
    for (double& v : b) v = normal(rng) + 1.0;
    std::vector<int> perm(7);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double cost = 0.0;
      for (int i = 0; i < 7; ++i) cost += std::abs(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])]);
      best = std::min(best, cost / 7.0);
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_NEAR(wasserstein_1d(a, b), best, 1e-12);
  }
}

TEST(Wasserstein, UnequalSizesUseQuantiles) {
  // {0, 1} against {0}: half the mass moves by 1.
  EXPECT_DOUBLE_EQ(wasserstein_1d(std::vector<double>{0.0, 1.0}, std::vector<double>{0.0}), 0.5);
  // {0, 3, 6} against {0, 6}: the middle third splits evenly, moving 3 each way.
  EXPECT_NEAR(wasserstein_1d(std::vector<double>{0.0, 3.0, 6.0}, std::vector<double>{0.0, 6.0}), 1.0, 1e-12);
}

TEST(Wasserstein, MetricProperties) {
  Rng rng = make_rng(64);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(10), b(10), c(10);
    for (double& v : a) v = normal(rng);
    for (double& v : b) v = 2.0 * normal(rng);
    for (double& v : c) v = normal(rng) - 1.0;
    const double ab = wasserstein_1d(a, b);
    EXPECT_GE(ab, 0.0);
    EXPECT_DOUBLE_EQ(ab, wasserstein_1d(b, a));
    EXPECT_LE(wasserstein_1d(a, c), ab + wasserstein_1d(b, c) + 1e-12);
  }
}

TEST(Wasserstein, PerStateAveragesRows) {
  Matrix a(2, 2);
  a << 0.0, 0.0, 1.0, 3.0;
  Matrix b(2, 2);
  b << 2.0, 2.0, 1.0, 3.0;
  EXPECT_DOUBLE_EQ(wasserstein_per_state(a, b), 1.0);
}

TEST(Summary, MeanAndStandardError) {
  std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  SampleSummary s = summarize(x);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  // Sample variance 5/3 over four values.
  EXPECT_NEAR(s.standard_error, std::sqrt(5.0 / 3.0 / 4.0), 1e-12);
  EXPECT_DOUBLE_EQ(summarize(std::vector<double>{2.0}).standard_error, 0.0);
}

// ----------------------------------------------------------------- run log and CSV

TEST(RunLogTest, LoggingCadence) {
  EXPECT_TRUE(is_logging_step(1, 5000));
  EXPECT_TRUE(is_logging_step(1000, 5000));
  EXPECT_FALSE(is_logging_step(1001, 5000));
  EXPECT_TRUE(is_logging_step(1100, 5000));
  EXPECT_TRUE(is_logging_step(4999, 4999));
}

TEST(RunLogTest, CheckpointsCarrySmoothedRewardAndReplanFlags) {
  RunLog log(7);
  for (long t = 1; t <= 1205; ++t) log.record({t, 0, 0, t == 1 ? 1.0 : 0.0}, t == 3 || t == 1200);
  std::vector<Checkpoint> rows = log.checkpoints(1.0);
  ASSERT_EQ(rows.size(), 1000u + 2u + 1u);
  EXPECT_EQ(rows[0].seed, 7u);
  EXPECT_DOUBLE_EQ(rows[1].smoothed_reward, 0.5);
  EXPECT_TRUE(rows[2].replanned);
  EXPECT_FALSE(rows[3].replanned);
  EXPECT_EQ(rows[1001].step, 1200);
  EXPECT_TRUE(rows[1001].replanned);
  EXPECT_EQ(rows.back().step, 1205);
}

TEST(RunLogTest, CsvRoundTrip) {
  std::vector<Checkpoint> rows{{1, 1, 2.0, 2.0, true}, {1, 2, 0.1, 1.0 / 3.0, false}, {2, 1, -10.0, 1e-7, false}};
  std::stringstream buf;
  write_checkpoints_csv(buf, rows);
  std::vector<Checkpoint> back = read_checkpoints_csv(buf);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].seed, rows[i].seed);
    EXPECT_EQ(back[i].step, rows[i].step);
    EXPECT_EQ(back[i].replanned, rows[i].replanned);
    EXPECT_NEAR(back[i].smoothed_reward, rows[i].smoothed_reward, 1e-9 * std::abs(rows[i].smoothed_reward));
  }
}

TEST(RunLogTest, CsvRejectsWrongHeader) {
  std::stringstream buf("step,reward\n1,2\n");
  EXPECT_ANY_THROW(read_checkpoints_csv(buf));
}

// ----------------------------------------------------------------- configuration

TEST(ConfigTest, ParsesKeysCommentsAndLists) {
  KeyValueConfig kv = KeyValueConfig::parse_string(
      "# experiment\n"
      "environment = doubleloop\n"
      "\n"
      "algorithm = psrl\n"
      "seeds = 1-3, 7\n"
      "steps = 2500\n"
      "sample_rewards = false\n");
  ExperimentConfig c = experiment_config_from(kv);
  EXPECT_EQ(c.environment, "doubleloop");
  EXPECT_EQ(c.algorithm, Algorithm::kPsrl);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{1, 2, 3, 7}));
  EXPECT_EQ(c.steps, 2500);
  EXPECT_EQ(c.planner.reward_sampling, RewardSampling::kPosteriorMean);
  EXPECT_EQ(c.planner.lookahead, 100);
}

TEST(ConfigTest, EnvironmentDefaults) {
  EXPECT_EQ(ExperimentConfig::defaults_for("pendulum").planner.lookahead, 20);
  EXPECT_EQ(ExperimentConfig::defaults_for("maze").planner.n_value_samples, 20);
  EXPECT_EQ(ExperimentConfig::defaults_for("nchain").planner.n_value_samples, 50);
  EXPECT_THROW(ExperimentConfig::defaults_for("cartpole"), std::invalid_argument);
}

TEST(ConfigTest, RejectsMalformedInput) {
  EXPECT_THROW(KeyValueConfig::parse_string("a = 1\na = 2\n"), ConfigError);
  EXPECT_THROW(KeyValueConfig::parse_string("no equals sign\n"), ConfigError);
  EXPECT_THROW(experiment_config_from(KeyValueConfig::parse_string("stepz = 10\n")), ConfigError);
  EXPECT_THROW(experiment_config_from(KeyValueConfig::parse_string("steps = many\n")), ConfigError);
  EXPECT_THROW(experiment_config_from(KeyValueConfig::parse_string("algorithm = psrl\nenvironment = linear\n")),
               std::invalid_argument);
}

TEST(ScheduleTest, TriangularAndFixedInterval) {
  std::vector<long> hits;
  for (long t = 1; t <= 60; ++t)
    if (is_replan_step(ReplanSchedule::kTriangular, 1, t)) hits.push_back(t);
  EXPECT_EQ(hits, (std::vector<long>{1, 3, 6, 10, 15, 21, 28, 36, 45, 55}));
  EXPECT_TRUE(is_replan_step(ReplanSchedule::kTriangular, 1, 500500));
  EXPECT_FALSE(is_replan_step(ReplanSchedule::kTriangular, 1, 500501));
  hits.clear();
  for (long t = 1; t <= 12; ++t)
    if (is_replan_step(ReplanSchedule::kEvery, 5, t)) hits.push_back(t);
  EXPECT_EQ(hits, (std::vector<long>{1, 6, 11}));
}

// ----------------------------------------------------------------- experiment runs

TEST(ExperimentTest, RandomPolicyEarnsStationaryGain) {
  ExperimentConfig c = ExperimentConfig::defaults_for("nchain");
  c.algorithm = Algorithm::kRandom;
  c.steps = 20000;
  c.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  c.threads = 1;
  ExperimentResult result = run_experiment(c);
  std::vector<double> means;
  for (const SeedResult& s : result.seeds) {
    double total = 0.0;
    for (const StepRecord& r : s.log.steps()) total += r.reward;
    means.push_back(total / static_cast<double>(s.log.steps().size()));
  }
  const SampleSummary summary = summarize(means);
  const double gain = average_reward(NChain(0).as_mdp(0.99), StationaryPolicy::uniform(5, 2));
  EXPECT_NEAR(summary.mean, gain, 3.0 * summary.standard_error);
}

TEST(ExperimentTest, AggregateIsPointwiseMean) {
  ExperimentConfig c = ExperimentConfig::defaults_for("nchain");
  c.algorithm = Algorithm::kPsrl;
  c.steps = 1500;
  c.seeds = {1, 2, 3};
  c.threads = 1;
  ExperimentResult result = run_experiment(c);
  ASSERT_EQ(result.aggregate.size(), result.seeds.front().checkpoints.size());
  for (std::size_t i = 0; i < result.aggregate.size(); ++i) {
    double mean = 0.0;
    for (const SeedResult& s : result.seeds) mean += s.checkpoints[i].smoothed_reward;
    EXPECT_NEAR(result.aggregate[i].mean, mean / 3.0, 1e-12);
    EXPECT_EQ(result.aggregate[i].step, result.seeds.front().checkpoints[i].step);
  }
}

TEST(ExperimentTest, RerunsAreBitIdentical) {
  ExperimentConfig c = ExperimentConfig::defaults_for("nchain");
  c.steps = 300;
  c.seeds = {4, 5};
  c.planner.lookahead = 30;
  c.threads = 1;
  const std::string first = experiment_csv(run_experiment(c));
  c.threads = 2;
  const std::string second = experiment_csv(run_experiment(c));
  EXPECT_EQ(first, second);
  EXPECT_EQ(first.substr(0, first.find('\n')), kCheckpointHeader);
}

TEST(ExperimentTest, WritesOutputFiles) {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "infind_harness_test";
  std::filesystem::remove_all(dir);
  ExperimentConfig c = ExperimentConfig::defaults_for("doubleloop");
  c.algorithm = Algorithm::kMmbi;
  c.steps = 200;
  c.seeds = {1, 2};
  c.threads = 1;
  c.output_dir = dir.string();
  c.output_prefix = "t";
  write_experiment_outputs(c, run_experiment(c));
  EXPECT_TRUE(std::filesystem::exists(dir / "t.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "t_seed1.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "t_aggregate.csv"));
  std::ifstream in(dir / "t_seed2.csv");
  std::vector<Checkpoint> rows = read_checkpoints_csv(in);
  EXPECT_EQ(rows.size(), 200u);
  EXPECT_EQ(rows.front().seed, 2u);
  std::filesystem::remove_all(dir);
}

TEST(ExperimentTest, ParallelForVisitsEveryIndexOnce) {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 3, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
}
