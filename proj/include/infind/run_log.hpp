#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace infind {

/// One interaction step. `state` is the discrete state id, or -1 for
/// continuous environments.
struct StepRecord {
  long t = 0;
  int state = -1;
  int action = 0;
  double reward = 0.0;
};

/// A row of the per-seed CSV.
struct Checkpoint {
  std::uint64_t seed = 0;
  long step = 0;
  double reward = 0.0;
  double smoothed_reward = 0.0;
  bool replanned = false;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

/// Complete record of one seeded run.
class RunLog {
 public:
  explicit RunLog(std::uint64_t seed = 0) : seed_(seed) {}

  /// Steps must arrive with t = 1, 2, 3, ...
  void record(const StepRecord& step, bool replanned);
  void mark_episode_end(long t) { episode_ends_.push_back(t); }

  std::uint64_t seed() const { return seed_; }
  const std::vector<StepRecord>& steps() const { return steps_; }
  const std::vector<long>& replan_steps() const { return replan_steps_; }
  const std::vector<long>& episode_ends() const { return episode_ends_; }

  /// Smoothed rewards at the logging cadence: every step up to 1000, then
  /// every 100th step, plus the final step.
  std::vector<Checkpoint> checkpoints(double half_life) const;

 private:
  std::uint64_t seed_;
  std::vector<StepRecord> steps_;
  std::vector<long> replan_steps_;
  std::vector<long> episode_ends_;
};

bool is_logging_step(long t, long last_step);

inline constexpr const char* kCheckpointHeader = "seed,step,reward,smoothed_reward,replanned";

/// Nine significant digits, shortest form.
std::string format_real(double value);

void write_checkpoints_csv(std::ostream& out, const std::vector<Checkpoint>& rows);
std::vector<Checkpoint> read_checkpoints_csv(std::istream& in);

}  // namespace infind
