#include "infind/random.hpp"

#include <array>
#include <cmath>

namespace infind {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x9e3779b9u};
  return Rng(seq);
}

double sample_gamma(double shape, double rate, Rng& rng) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw std::invalid_argument("gamma parameters must be positive");
  }
  std::gamma_distribution<double> dist(shape, 1.0 / rate);
  return dist(rng);
}

Vector sample_dirichlet(const Eigen::Ref<const Vector>& alpha, Rng& rng) {
  Vector draw(alpha.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    draw[i] = sample_gamma(alpha[i], 1.0, rng);
  }
  double total = draw.sum();
  if (!(total > 0.0)) {
    // Every gamma variate underflowed; fall back to the largest parameter.
    Eigen::Index best = 0;
    alpha.maxCoeff(&best);
    draw.setZero();
    draw[best] = 1.0;
    return draw;
  }
  return draw / total;
}

Vector standard_normal(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal;
  Vector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(rng);
  return z;
}

Matrix standard_normal(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal;
  Matrix z(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) z(r, c) = normal(rng);
  }
  return z;
}

Matrix cholesky_with_jitter(const Matrix& cov, double base_jitter, int max_attempts) {
  const Eigen::Index n = cov.rows();
  if (cov.cols() != n) throw std::invalid_argument("covariance must be square");
  if (!cov.allFinite()) throw NumericalError("covariance has non-finite entries");
  Matrix sym = 0.5 * (cov + cov.transpose());
  double eps = base_jitter * (1.0 + std::abs(sym.trace()) / static_cast<double>(std::max<Eigen::Index>(n, 1)));
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Matrix jittered = sym;
    jittered.diagonal().array() += eps;
    Eigen::LLT<Matrix> llt(jittered);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    eps *= 10.0;
  }
  throw NumericalError("matrix is not positive definite after maximum jitter");
}

Matrix sample_inverse_wishart(const Matrix& scale, double dof, Rng& rng) {
  const Eigen::Index d = scale.rows();
  if (dof <= static_cast<double>(d) - 1.0) {
    throw std::invalid_argument("inverse-Wishart degrees of freedom must exceed dimension - 1");
  }
  // Sigma^{-1} ~ Wishart(scale^{-1}, dof).
  Matrix scale_inv = cholesky_with_jitter(scale).triangularView<Eigen::Lower>().solve(Matrix::Identity(d, d));
  scale_inv = scale_inv.transpose() * scale_inv;
  Matrix chol = cholesky_with_jitter(scale_inv);

  std::normal_distribution<double> normal;
  Matrix bartlett = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    std::chi_squared_distribution<double> chi2(dof - static_cast<double>(i));
    bartlett(i, i) = std::sqrt(chi2(rng));
    for (Eigen::Index j = 0; j < i; ++j) bartlett(i, j) = normal(rng);
  }
  Matrix factor = chol * bartlett;
  Matrix precision = factor * factor.transpose();
  Matrix precision_chol = cholesky_with_jitter(precision);
  Matrix inv_lower = precision_chol.triangularView<Eigen::Lower>().solve(Matrix::Identity(d, d));
  Matrix sigma = inv_lower.transpose() * inv_lower;
  return 0.5 * (sigma + sigma.transpose());
}

}  // namespace infind
