#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

namespace infind {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

/// Raised when a covariance or precision matrix cannot be factored even after
/// the jitter schedule is exhausted.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Seeds a generator from a (seed, stream) pair so that independent components
/// of one run (environment, agent, evaluation) never share a sequence.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

double sample_gamma(double shape, double rate, Rng& rng);
Vector sample_dirichlet(const Eigen::Ref<const Vector>& alpha, Rng& rng);
Vector standard_normal(Eigen::Index n, Rng& rng);
Matrix standard_normal(Eigen::Index rows, Eigen::Index cols, Rng& rng);

/// Lower Cholesky factor of `cov + eps*I`. The first attempt uses
/// eps = base_jitter * (1 + trace/n); eps grows tenfold per failure.
Matrix cholesky_with_jitter(const Matrix& cov, double base_jitter = 1e-10,
                            int max_attempts = 12);

/// Draws Sigma ~ InverseWishart(scale, dof) by the Bartlett decomposition of
/// the Wishart draw of Sigma^{-1}.
Matrix sample_inverse_wishart(const Matrix& scale, double dof, Rng& rng);

}  // namespace infind
