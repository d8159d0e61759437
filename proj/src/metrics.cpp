#include "infind/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace infind {

ExpSmoother::ExpSmoother(double half_life) {
  if (!(half_life > 0.0)) throw std::invalid_argument("half-life must be positive");
  lambda_ = std::exp2(-1.0 / half_life);
}

double ExpSmoother::push(double x) {
  if (!started_) {
    value_ = x;
    started_ = true;
  } else {
    value_ = lambda_ * value_ + (1.0 - lambda_) * x;
  }
  return value_;
}

std::vector<double> exp_smooth(std::span<const double> series, double half_life) {
  if (series.empty()) throw std::invalid_argument("cannot smooth an empty series");
  ExpSmoother smoother(half_life);
  std::vector<double> out;
  out.reserve(series.size());
  for (double x : series) out.push_back(smoother.push(x));
  return out;
}

double wasserstein_1d(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("Wasserstein distance needs nonempty samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  if (x.size() == y.size()) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) total += std::abs(x[i] - y[i]);
    return total / static_cast<double>(x.size());
  }
  // Integral of |F_a(t) - F_b(t)| over the merged support.
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double prev = std::min(x.front(), y.front());
  double total = 0.0;
  while (i < x.size() || j < y.size()) {
    const double next = (j >= y.size() || (i < x.size() && x[i] <= y[j])) ? x[i] : y[j];
    total += std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb) * (next - prev);
    while (i < x.size() && x[i] == next) ++i;
    while (j < y.size() && y[j] == next) ++j;
    prev = next;
  }
  return total;
}

double wasserstein_per_state(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("sample matrices disagree in state count");
  if (a.rows() == 0) throw std::invalid_argument("Wasserstein distance needs at least one state");
  double total = 0.0;
  for (Eigen::Index s = 0; s < a.rows(); ++s) {
    const Eigen::RowVectorXd ra = a.row(s);
    const Eigen::RowVectorXd rb = b.row(s);
    total += wasserstein_1d(std::span<const double>(ra.data(), static_cast<std::size_t>(ra.size())),
                            std::span<const double>(rb.data(), static_cast<std::size_t>(rb.size())));
  }
  return total / static_cast<double>(a.rows());
}

SampleSummary summarize(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("cannot summarize an empty sample");
  SampleSummary out;
  double sum = 0.0;
  for (double v : values) sum += v;
  const double n = static_cast<double>(values.size());
  out.mean = sum / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.standard_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

}  // namespace infind
