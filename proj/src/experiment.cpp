#include "infind/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace infind {

Algorithm parse_algorithm(const std::string& id) {
  if (id == "bbi") return Algorithm::kBbi;
  if (id == "psrl") return Algorithm::kPsrl;
  if (id == "mmbi") return Algorithm::kMmbi;
  if (id == "mean-field-bbi") return Algorithm::kMeanFieldBbi;
  if (id == "random") return Algorithm::kRandom;
  throw std::invalid_argument("unknown algorithm '" + id + "'");
}

std::string algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kBbi: return "bbi";
    case Algorithm::kPsrl: return "psrl";
    case Algorithm::kMmbi: return "mmbi";
    case Algorithm::kMeanFieldBbi: return "mean-field-bbi";
    case Algorithm::kRandom: return "random";
  }
  return "unknown";
}

ExperimentConfig ExperimentConfig::defaults_for(const std::string& environment) {
  ExperimentConfig c;
  c.environment = environment;
  if (is_continuous_environment(environment)) {
    c.planner.lookahead = 20;
  } else if (is_discrete_environment(environment)) {
    c.planner.lookahead = 100;
  } else {
    throw std::invalid_argument("unknown environment '" + environment + "'");
  }
  if (environment == "lavalake10x10" || environment == "maze") c.planner.n_value_samples = 20;
  return c;
}

void ExperimentConfig::validate() const {
  const bool discrete = is_discrete_environment(environment);
  if (!discrete && !is_continuous_environment(environment)) {
    throw std::invalid_argument("unknown environment '" + environment + "'");
  }
  if (!discrete && (algorithm == Algorithm::kPsrl || algorithm == Algorithm::kMmbi)) {
    throw std::invalid_argument(algorithm_name(algorithm) + " is only available for discrete environments");
  }
  planner.validate();
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");
  if (!(sigma_sq_factor > 0.0)) throw std::invalid_argument("sigma_sq_factor must be positive");
  if (steps < 1) throw std::invalid_argument("steps must be at least 1");
  if (seeds.empty()) throw std::invalid_argument("seed list must be nonempty");
  if (!(half_life > 0.0)) throw std::invalid_argument("half_life must be positive");
  if (schedule == ReplanSchedule::kEvery && replan_interval < 1) {
    throw std::invalid_argument("replan_interval must be at least 1");
  }
  if (eval_episodes < 1 || eval_max_steps < 1) throw std::invalid_argument("evaluation needs episodes and steps");
  if (threads < 0) throw std::invalid_argument("threads must be non-negative");
}

ExperimentConfig experiment_config_from(const KeyValueConfig& kv) {
  ExperimentConfig c = ExperimentConfig::defaults_for(kv.get_string("environment", "nchain"));
  c.map_file = kv.get_string("map_file", c.map_file);
  c.matrix_seed = static_cast<std::uint64_t>(kv.get_long("matrix_seed", static_cast<long>(c.matrix_seed)));
  c.algorithm = parse_algorithm(kv.get_string("algorithm", algorithm_name(c.algorithm)));

  InductionConfig& p = c.planner;
  p.lookahead = kv.get_int("lookahead", p.lookahead);
  p.n_mdp_samples = kv.get_int("n_mdp_samples", p.n_mdp_samples);
  p.n_value_samples = kv.get_int("n_value_samples", p.n_value_samples);
  p.n_next_value_samples = kv.get_int("n_next_value_samples", p.n_next_value_samples);
  p.max_sigma_doublings = kv.get_int("max_sigma_doublings", p.max_sigma_doublings);
  p.ridge_lambda = kv.get_double("ridge_lambda", p.ridge_lambda);
  p.n_probe_states = kv.get_int("n_probe_states", p.n_probe_states);
  p.history_fraction = kv.get_double("history_fraction", p.history_fraction);
  p.reward_sampling = kv.get_bool("sample_rewards", true) ? RewardSampling::kSampled : RewardSampling::kPosteriorMean;
  const std::string rollout = kv.get_string("rollout", "bootstrap");
  if (rollout == "bootstrap") {
    p.rollout = RolloutMode::kBootstrapValue;
  } else if (rollout == "expected") {
    p.rollout = RolloutMode::kExpectedUtility;
  } else if (rollout == "sampled") {
    p.rollout = RolloutMode::kSampledUtility;
  } else {
    throw ConfigError("rollout must be bootstrap, expected or sampled");
  }

  c.gamma = kv.get_double("gamma", c.gamma);
  c.sigma_sq_factor = kv.get_double("sigma_sq_factor", c.sigma_sq_factor);
  c.steps = kv.get_long("steps", c.steps);
  c.seeds = kv.get_seed_list("seeds", c.seeds);
  const std::string schedule = kv.get_string("replan", "triangular");
  if (schedule == "triangular") {
    c.schedule = ReplanSchedule::kTriangular;
  } else if (schedule == "every") {
    c.schedule = ReplanSchedule::kEvery;
  } else {
    throw ConfigError("replan must be triangular or every");
  }
  c.replan_interval = kv.get_long("replan_interval", c.replan_interval);
  c.half_life = kv.get_double("half_life", c.half_life);
  c.eval_checkpoints = kv.get_long_list("eval_checkpoints", c.eval_checkpoints);
  c.eval_episodes = kv.get_int("eval_episodes", c.eval_episodes);
  c.eval_max_steps = kv.get_long("eval_max_steps", c.eval_max_steps);
  c.output_dir = kv.get_string("output_dir", c.output_dir);
  c.output_prefix = kv.get_string("output_prefix", c.output_prefix);
  c.threads = kv.get_int("threads", c.threads);
  kv.reject_unused();
  c.validate();
  return c;
}

bool is_replan_step(ReplanSchedule schedule, long interval, long t) {
  if (t < 1) return false;
  if (schedule == ReplanSchedule::kEvery) return (t - 1) % interval == 0;
  // t is triangular iff 8t + 1 is a perfect square.
  const long disc = 8 * t + 1;
  long root = static_cast<long>(std::sqrt(static_cast<double>(disc)));
  while (root * root > disc) --root;
  while ((root + 1) * (root + 1) <= disc) ++root;
  return root * root == disc;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// ------------------------------------------------------------ DiscreteAgent

DiscreteAgent::DiscreteAgent(const ExperimentConfig& config, int n_states, int n_actions, RewardRange rewards, Rng rng)
    : config_(config),
      posterior_(n_states, n_actions, config.gamma),
      scale_(LikelihoodScale::from_value_span(rewards.value_span(config.gamma), config.sigma_sq_factor)),
      rng_(std::move(rng)),
      policy_(StationaryPolicy::uniform(n_states, n_actions)) {}

void DiscreteAgent::replan() {
  scale_.reset();
  switch (config_.algorithm) {
    case Algorithm::kBbi:
    case Algorithm::kMeanFieldBbi: {
      InductionConfig c = config_.planner;
      c.weight_mode = config_.algorithm == Algorithm::kBbi ? WeightMode::kImportance : WeightMode::kMeanField;
      bbi_plan_ = bbi_plan(posterior_, c, scale_, rng_);
      policy_ = bbi_plan_->policy.first();
      break;
    }
    case Algorithm::kPsrl:
      policy_ = psrl_plan(posterior_, rng_, config_.planner.reward_sampling);
      break;
    case Algorithm::kMmbi:
      policy_ = mmbi_plan(posterior_, config_.planner.n_mdp_samples, config_.planner.lookahead, rng_,
                          config_.planner.reward_sampling)
                    .first();
      break;
    case Algorithm::kRandom:
      break;
  }
}

int DiscreteAgent::act(int state) { return policy_.sample(state, rng_); }

// ------------------------------------------------------------ runs

namespace {

SeedResult run_discrete_seed(const ExperimentConfig& config, std::uint64_t seed) {
  auto env = make_discrete_environment(config.environment, seed, config.map_file);
  DiscreteAgent agent(config, env->n_states(), env->n_actions(), env->reward_range(), make_rng(seed, 1));
  SeedResult result{RunLog(seed), {}, {}, {}};
  int state = env->reset();
  long episode_start = 0;
  double episode_reward = 0.0;
  for (long t = 1; t <= config.steps; ++t) {
    const bool replanned = is_replan_step(config.schedule, config.replan_interval, t);
    if (replanned) agent.replan();
    const int action = agent.act(state);
    const DiscreteStep step = env->step(action);
    agent.observe({state, action, step.reward, step.next_state});
    result.log.record({t, state, action, step.reward}, replanned);
    episode_reward += step.reward;
    if (step.terminal) {
      result.log.mark_episode_end(t);
      result.episodes.push_back({seed, static_cast<long>(result.episodes.size()) + 1, t, t - episode_start,
                                 episode_reward});
      episode_start = t;
      episode_reward = 0.0;
    }
    state = step.next_state;
  }
  result.checkpoints = result.log.checkpoints(config.half_life);
  return result;
}

SeedResult run_continuous_seed(const ExperimentConfig& config, std::uint64_t seed) {
  auto env = make_continuous_environment(config.environment, seed, config.matrix_seed);
  const ContinuousModelSpec model = env->model_spec();
  BayesLinRegPosterior posterior(model.feature_dim, model.state_dim, model.n_actions, config.gamma);
  LikelihoodScale scale =
      LikelihoodScale::from_value_span(env->reward_range().value_span(config.gamma), config.sigma_sq_factor);
  InductionConfig planner = config.planner;
  planner.weight_mode = config.algorithm == Algorithm::kMeanFieldBbi ? WeightMode::kMeanField : WeightMode::kImportance;
  const bool random = config.algorithm == Algorithm::kRandom;

  Rng rng = make_rng(seed, 1);
  Rng eval_rng = make_rng(seed, 2);
  std::uniform_int_distribution<int> uniform_action(0, model.n_actions - 1);
  std::vector<Vector> history;
  std::optional<ContinuousPlan> plan;

  SeedResult result{RunLog(seed), {}, {}, {}};
  Vector state = env->reset();
  long episode_start = 0;
  double episode_reward = 0.0;
  for (long t = 1; t <= config.steps; ++t) {
    const bool replanned = is_replan_step(config.schedule, config.replan_interval, t);
    if (replanned && !random) {
      scale.reset();
      plan = bbi_plan_continuous(posterior, model, history, planner, scale, rng);
    }
    const Vector phi = model.features(state);
    const int action = random ? uniform_action(rng) : plan->act(phi);
    const ContinuousStep step = env->step(action);
    posterior.update(action, phi, step.reward, model.target(state, step.next_state));
    history.push_back(state);
    result.log.record({t, -1, action, step.reward}, replanned);
    episode_reward += step.reward;
    if (step.terminal) {
      result.log.mark_episode_end(t);
      result.episodes.push_back({seed, static_cast<long>(result.episodes.size()) + 1, t, t - episode_start,
                                 episode_reward});
      episode_start = t;
      episode_reward = 0.0;
      state = env->state();
    } else {
      state = step.next_state;
    }
    if (std::find(config.eval_checkpoints.begin(), config.eval_checkpoints.end(), t) != config.eval_checkpoints.end()) {
      const std::uint64_t eval_seed = seed * 1000003u + static_cast<std::uint64_t>(t);
      EvaluationRecord rec = evaluate_continuous_policy(config.environment, eval_seed, config.matrix_seed,
                                                        random ? nullptr : &*plan, config.eval_episodes,
                                                        config.eval_max_steps, eval_rng);
      rec.seed = seed;
      rec.step = t;
      result.evaluations.push_back(rec);
    }
  }
  result.checkpoints = result.log.checkpoints(config.half_life);
  return result;
}

}  // namespace

EvaluationRecord evaluate_continuous_policy(const std::string& environment, std::uint64_t env_seed,
                                            std::uint64_t matrix_seed, const ContinuousPlan* plan, int episodes,
                                            long max_steps, Rng& rng) {
  if (episodes < 1) throw std::invalid_argument("evaluation needs at least one episode");
  auto env = make_continuous_environment(environment, env_seed, matrix_seed);
  std::uniform_int_distribution<int> uniform_action(0, env->n_actions() - 1);
  double total_length = 0.0;
  double total_return = 0.0;
  for (int e = 0; e < episodes; ++e) {
    Vector state = env->reset();
    long length = 0;
    double ret = 0.0;
    while (length < max_steps) {
      const int action = plan ? plan->act(env->features(state)) : uniform_action(rng);
      const ContinuousStep step = env->step(action);
      ++length;
      ret += step.reward;
      if (step.terminal) break;
      state = step.next_state;
    }
    total_length += static_cast<double>(length);
    total_return += ret;
  }
  EvaluationRecord out;
  out.mean_length = total_length / episodes;
  out.mean_return = total_return / episodes;
  return out;
}

SeedResult run_seed(const ExperimentConfig& config, std::uint64_t seed) {
  config.validate();
  if (is_discrete_environment(config.environment)) return run_discrete_seed(config, seed);
  return run_continuous_seed(config, seed);
}

std::vector<AggregatePoint> aggregate_curves(const std::vector<SeedResult>& seeds) {
  if (seeds.empty()) return {};
  const std::size_t n = seeds.front().checkpoints.size();
  for (const SeedResult& s : seeds) {
    if (s.checkpoints.size() != n) throw std::invalid_argument("seed curves disagree in length");
  }
  std::vector<AggregatePoint> out(n);
  std::vector<double> column(seeds.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < seeds.size(); ++k) column[k] = seeds[k].checkpoints[i].smoothed_reward;
    const SampleSummary summary = summarize(column);
    out[i] = {seeds.front().checkpoints[i].step, summary.mean, summary.standard_error};
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult result;
  result.seeds.resize(config.seeds.size());
  parallel_for(config.seeds.size(), config.threads,
               [&](std::size_t i) { result.seeds[i] = run_seed(config, config.seeds[i]); });
  result.aggregate = aggregate_curves(result.seeds);
  return result;
}

std::string experiment_csv(const ExperimentResult& result) {
  std::vector<Checkpoint> rows;
  for (const SeedResult& s : result.seeds) rows.insert(rows.end(), s.checkpoints.begin(), s.checkpoints.end());
  std::ostringstream out;
  write_checkpoints_csv(out, rows);
  return out.str();
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

void write_experiment_outputs(const ExperimentConfig& config, const ExperimentResult& result) {
  const std::filesystem::path dir = config.output_dir.empty() ? "." : config.output_dir;
  std::filesystem::create_directories(dir);
  const std::string& prefix = config.output_prefix;

  write_text(dir / (prefix + ".csv"), experiment_csv(result));
  for (const SeedResult& s : result.seeds) {
    std::ostringstream out;
    write_checkpoints_csv(out, s.checkpoints);
    write_text(dir / (prefix + "_seed" + std::to_string(s.log.seed()) + ".csv"), out.str());
  }

  std::ostringstream agg;
  agg << "step,mean,stderr\n";
  for (const AggregatePoint& p : result.aggregate) {
    agg << p.step << ',' << format_real(p.mean) << ',' << format_real(p.standard_error) << '\n';
  }
  write_text(dir / (prefix + "_aggregate.csv"), agg.str());

  if (is_continuous_environment(config.environment)) {
    std::ostringstream ep;
    ep << "seed,episode,end_step,length,total_reward\n";
    for (const SeedResult& s : result.seeds) {
      for (const EpisodeRecord& e : s.episodes) {
        ep << e.seed << ',' << e.episode << ',' << e.end_step << ',' << e.length << ',' << format_real(e.total_reward)
           << '\n';
      }
    }
    write_text(dir / (prefix + "_episodes.csv"), ep.str());
    std::ostringstream ev;
    ev << "seed,step,mean_length,mean_return\n";
    for (const SeedResult& s : result.seeds) {
      for (const EvaluationRecord& e : s.evaluations) {
        ev << e.seed << ',' << e.step << ',' << format_real(e.mean_length) << ',' << format_real(e.mean_return)
           << '\n';
      }
    }
    write_text(dir / (prefix + "_eval.csv"), ev.str());
  }
}

// ------------------------------------------------------------ studies

namespace {

double start_state_distance(const Matrix& estimate, const Matrix& truth, int start, bool per_state) {
  if (per_state) return wasserstein_per_state(estimate, truth);
  const Eigen::RowVectorXd a = estimate.row(start);
  const Eigen::RowVectorXd b = truth.row(start);
  return wasserstein_1d(std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
                        std::span<const double>(b.data(), static_cast<std::size_t>(b.size())));
}

double induction_distance(const DirichletNormalGammaPosterior& posterior, const StationaryPolicy& policy,
                          const InductionConfig& induction, const LikelihoodScale& base_scale, const Matrix& truth,
                          int start, int belief_samples, bool per_state, Rng rng) {
  LikelihoodScale scale = base_scale;
  const std::vector<ValueBeliefGaussian> beliefs = policy_evaluation_method1(posterior, policy, induction, scale, rng);
  const Matrix samples = sample_belief(beliefs.front(), belief_samples, rng);
  return start_state_distance(samples, truth, start, per_state);
}

}  // namespace

std::vector<PosteriorQualityRow> posterior_quality_experiment(const PosteriorQualityConfig& config) {
  if (config.checkpoints.empty()) throw std::invalid_argument("posterior-quality study needs checkpoints");
  if (!std::is_sorted(config.checkpoints.begin(), config.checkpoints.end()) || config.checkpoints.front() < 0) {
    throw std::invalid_argument("checkpoints must be non-negative and increasing");
  }
  if (config.repetitions < 1 || config.truth_samples < 1 || config.belief_samples < 1) {
    throw std::invalid_argument("posterior-quality study needs positive sample counts");
  }
  if (!(config.first_action_prob >= 0.0 && config.first_action_prob <= 1.0)) {
    throw std::invalid_argument("first_action_prob must lie in [0, 1]");
  }
  config.induction.validate();

  NChain env(config.seed);
  const int n_states = env.n_states();
  Matrix table(n_states, env.n_actions());
  table.col(0).setConstant(config.first_action_prob);
  table.col(1).setConstant(1.0 - config.first_action_prob);
  const StationaryPolicy policy(table);
  const LikelihoodScale scale =
      LikelihoodScale::from_value_span(env.reward_range().value_span(config.gamma), config.sigma_sq_factor);
  const int start = env.start_state();

  DirichletNormalGammaPosterior posterior(n_states, env.n_actions(), config.gamma);
  Rng act_rng = make_rng(config.seed, 10);
  int state = env.reset();
  long t = 0;
  std::vector<PosteriorQualityRow> rows;
  for (std::size_t c = 0; c < config.checkpoints.size(); ++c) {
    for (; t < config.checkpoints[c]; ++t) {
      const int action = policy.sample(state, act_rng);
      const DiscreteStep step = env.step(action);
      posterior.update({state, action, step.reward, step.next_state});
      state = step.next_state;
    }
    PosteriorQualityRow row;
    row.step = config.checkpoints[c];
    Rng truth_rng = make_rng(config.seed, 1000 + c);
    const Matrix truth =
        mc_value_distribution(posterior, policy, config.truth_samples, truth_rng, config.induction.reward_sampling);

    const Vector mean_value = exact_policy_value(posterior.mean_mdp(), policy);
    row.mean_mdp = start_state_distance(Matrix(mean_value), truth, start, config.per_state);

    InductionConfig importance = config.induction;
    importance.weight_mode = WeightMode::kImportance;
    InductionConfig mean_field = config.induction;
    mean_field.weight_mode = WeightMode::kMeanField;
    double mean_field_total = 0.0;
    for (int r = 0; r < config.repetitions; ++r) {
      const std::uint64_t stream = 2000 + c * 1000 + static_cast<std::uint64_t>(r);
      row.induction_runs.push_back(induction_distance(posterior, policy, importance, scale, truth, start,
                                                      config.belief_samples, config.per_state,
                                                      make_rng(config.seed, stream)));
      if (config.include_mean_field) {
        mean_field_total += induction_distance(posterior, policy, mean_field, scale, truth, start,
                                               config.belief_samples, config.per_state, make_rng(config.seed, stream));
      }
    }
    row.induction = summarize(row.induction_runs).mean;
    row.mean_field = mean_field_total / config.repetitions;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string posterior_quality_csv(const std::vector<PosteriorQualityRow>& rows, bool include_mean_field) {
  std::ostringstream out;
  out << "step,inferential_induction,mean_mdp";
  if (include_mean_field) out << ",mean_field";
  out << '\n';
  for (const PosteriorQualityRow& r : rows) {
    out << r.step << ',' << format_real(r.induction) << ',' << format_real(r.mean_mdp);
    if (include_mean_field) out << ',' << format_real(r.mean_field);
    out << '\n';
  }
  return out.str();
}

std::vector<BayesBoundRow> bayes_bound_experiment(const BayesBoundConfig& config) {
  if (!is_discrete_environment(config.environment)) {
    throw std::invalid_argument("the Bayes-bound study needs a discrete environment");
  }
  if (config.seeds.empty()) throw std::invalid_argument("seed list must be nonempty");
  if (config.bound_samples < 1) throw std::invalid_argument("bound_samples must be positive");
  config.evaluation.validate();

  ExperimentConfig acting;
  acting.environment = config.environment;
  acting.map_file = config.map_file;
  acting.algorithm = Algorithm::kBbi;
  acting.planner = config.acting;
  acting.gamma = config.gamma;
  acting.sigma_sq_factor = config.sigma_sq_factor;

  std::vector<std::vector<BayesBoundRow>> per_seed(config.seeds.size());
  parallel_for(config.seeds.size(), config.threads, [&](std::size_t i) {
    const std::uint64_t seed = config.seeds[i];
    auto env = make_discrete_environment(config.environment, seed, config.map_file);
    DiscreteAgent agent(acting, env->n_states(), env->n_actions(), env->reward_range(), make_rng(seed, 1));
    const LikelihoodScale base_scale =
        LikelihoodScale::from_value_span(env->reward_range().value_span(config.gamma), config.sigma_sq_factor);
    const int start = env->start_state();
    int state = env->reset();
    std::size_t next_checkpoint = 0;
    for (long t = 0; t <= config.steps; ++t) {
      while (next_checkpoint < config.checkpoints.size() && config.checkpoints[next_checkpoint] == t) {
        Rng rng = make_rng(seed, 3000 + next_checkpoint);
        LikelihoodScale scale = base_scale;
        const PlanOutput plan = bbi_plan(agent.posterior(), config.evaluation, scale, rng);
        const MeanEstimate bound = bayes_upper_bound(agent.posterior(), start, config.bound_samples, rng,
                                                     config.evaluation.reward_sampling);
        per_seed[i].push_back({seed, t, plan.beliefs.front().mean(start), bound.mean, bound.standard_error});
        ++next_checkpoint;
      }
      if (t == config.steps) break;
      if (is_replan_step(ReplanSchedule::kTriangular, 1, t + 1)) agent.replan();
      const int action = agent.act(state);
      const DiscreteStep step = env->step(action);
      agent.observe({state, action, step.reward, step.next_state});
      state = step.next_state;
    }
  });
  std::vector<BayesBoundRow> rows;
  for (const auto& seed_rows : per_seed) rows.insert(rows.end(), seed_rows.begin(), seed_rows.end());
  return rows;
}

std::string bayes_bound_csv(const std::vector<BayesBoundRow>& rows) {
  std::ostringstream out;
  out << "seed,step,bbi_value,upper_bound,upper_bound_stderr\n";
  for (const BayesBoundRow& r : rows) {
    out << r.seed << ',' << r.step << ',' << format_real(r.bbi_value) << ',' << format_real(r.bound) << ','
        << format_real(r.bound_stderr) << '\n';
  }
  return out.str();
}

}  // namespace infind
