#pragma once

#include <span>
#include <vector>

#include "infind/random.hpp"

namespace infind {

/// y_1 = x_1, y_t = lambda y_{t-1} + (1 - lambda) x_t with lambda = 2^(-1/h).
std::vector<double> exp_smooth(std::span<const double> series, double half_life);

/// Streaming form of exp_smooth.
class ExpSmoother {
 public:
  explicit ExpSmoother(double half_life);
  double push(double x);
  double value() const { return value_; }
  bool empty() const { return !started_; }

 private:
  double lambda_;
  double value_ = 0.0;
  bool started_ = false;
};

/// One-dimensional W1 between empirical distributions.
double wasserstein_1d(std::span<const double> a, std::span<const double> b);

/// Average over states of the per-state W1; columns are samples.
double wasserstein_per_state(const Matrix& a, const Matrix& b);

struct SampleSummary {
  double mean = 0.0;
  double standard_error = 0.0;
};

SampleSummary summarize(std::span<const double> values);

}  // namespace infind
