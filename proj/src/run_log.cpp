#include "infind/run_log.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "infind/metrics.hpp"

namespace infind {

void RunLog::record(const StepRecord& step, bool replanned) {
  const long expected = static_cast<long>(steps_.size()) + 1;
  if (step.t != expected) {
    throw std::invalid_argument("run log expects step " + std::to_string(expected) + ", got " +
                                std::to_string(step.t));
  }
  steps_.push_back(step);
  if (replanned) replan_steps_.push_back(step.t);
}

bool is_logging_step(long t, long last_step) { return t <= 1000 || t % 100 == 0 || t == last_step; }

std::vector<Checkpoint> RunLog::checkpoints(double half_life) const {
  ExpSmoother smoother(half_life);
  std::vector<Checkpoint> out;
  const long last = static_cast<long>(steps_.size());
  std::size_t next_replan = 0;
  for (const StepRecord& s : steps_) {
    const double y = smoother.push(s.reward);
    while (next_replan < replan_steps_.size() && replan_steps_[next_replan] < s.t) ++next_replan;
    const bool replanned = next_replan < replan_steps_.size() && replan_steps_[next_replan] == s.t;
    if (is_logging_step(s.t, last)) out.push_back({seed_, s.t, s.reward, y, replanned});
  }
  return out;
}

std::string format_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

void write_checkpoints_csv(std::ostream& out, const std::vector<Checkpoint>& rows) {
  out << kCheckpointHeader << '\n';
  for (const Checkpoint& c : rows) {
    out << c.seed << ',' << c.step << ',' << format_real(c.reward) << ',' << format_real(c.smoothed_reward) << ','
        << (c.replanned ? 1 : 0) << '\n';
  }
}

std::vector<Checkpoint> read_checkpoints_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCheckpointHeader) {
    throw std::runtime_error("CSV header must be '" + std::string(kCheckpointHeader) + "'");
  }
  std::vector<Checkpoint> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field[5];
    for (int i = 0; i < 5; ++i) {
      if (!std::getline(ss, field[i], ',')) {
        throw std::runtime_error("CSV line " + std::to_string(line_no) + ": expected 5 fields");
      }
    }
    try {
      Checkpoint c;
      c.seed = std::stoull(field[0]);
      c.step = std::stol(field[1]);
      c.reward = std::stod(field[2]);
      c.smoothed_reward = std::stod(field[3]);
      c.replanned = std::stoi(field[4]) != 0;
      rows.push_back(c);
    } catch (const std::logic_error&) {
      throw std::runtime_error("CSV line " + std::to_string(line_no) + ": malformed number");
    }
  }
  return rows;
}

}  // namespace infind
