#pragma once

// Distance-shrinkage estimator: shrink every observed squared distance by
// eta = lambda / (2n), then project onto the EDM cone. The result solves
//   min_{M in D_n}  1/2 ||X - M||_F^2 + lambda * trace(-JMJ/2),
// i.e. the trace-regularized kernel estimate expressed in distance space.

#include <Eigen/Dense>

#include <cmath>

#include "edmshrink/cone_projection.hpp"
#include "edmshrink/edm_core.hpp"
#include "edmshrink/errors.hpp"
#include "edmshrink/types.hpp"

namespace edmshrink {

template <typename Scalar = double>
struct ShrinkageFit {
  EdmMatrix<Scalar> d_hat;
  MinTraceKernel<Scalar> k_hat;
  Scalar lambda;
  Scalar eta;  ///< lambda / (2n)
  ProjectionDiagnostics diagnostics;
};

template <typename Scalar = double>
struct RankTruncatedFit {
  int r;
  EdmMatrix<Scalar> d_hat_r;
  Embedding<Scalar> embedding;
};

/// Shrinks X by lambda/(2n) off the diagonal and projects onto the EDM cone.
/// Propagates NotConverged.
template <typename Scalar>
ShrinkageFit<Scalar> distance_shrinkage(const SymHollowMatrix<Scalar>& x, Scalar lambda,
                                        const DykstraConfig& cfg = {}) {
  if (!(lambda >= Scalar(0)) || !std::isfinite(lambda))
    throw DomainError("distance_shrinkage: lambda must be finite and >= 0");
  const Eigen::Index n = x.n();
  const Scalar eta = lambda / (Scalar(2) * static_cast<Scalar>(n));
  Matrix<Scalar> shrunk = x.matrix();
  shrunk.array() -= eta;
  shrunk.diagonal().setZero();
  auto projected = project_edm_cone(shrunk, cfg);
  auto k_hat = schoenberg_r(projected.edm);
  return {std::move(projected.edm), std::move(k_hat), lambda, eta, projected.diagnostics};
}

/// 1/2 ||X - M||_F^2 + lambda * trace(-JMJ/2).
template <typename Scalar>
Scalar objective_value(const EdmMatrix<Scalar>& m, const SymHollowMatrix<Scalar>& x,
                       Scalar lambda) {
  if (m.n() != x.n()) throw DimensionMismatch("objective_value: sizes differ");
  const Scalar fit = Scalar(0.5) * (x.matrix() - m.matrix()).squaredNorm();
  const Scalar penalty = Scalar(-0.5) * double_center(m.matrix()).trace();
  return fit + lambda * penalty;
}

/// Tuning parameter 4 sigma (sqrt(n) + 1) for additive noise of standard deviation sigma.
inline double default_lambda(long n, double sigma) {
  if (n < 2) throw DomainError("default_lambda: need n >= 2");
  if (!(sigma >= 0)) throw DomainError("default_lambda: sigma must be >= 0");
  return 4.0 * sigma * (std::sqrt(static_cast<double>(n)) + 1.0);
}

/// Risk bound 36 n sigma^2 (r + 1) on ||D_hat - D||_F^2 when dim(D) = r.
inline double oracle_bound(long n, double sigma, int r) {
  return 36.0 * static_cast<double>(n) * sigma * sigma * static_cast<double>(r + 1);
}

/// Bound 54 n^2 eta^2 (r + 1) on ||J(D_hat_r - D)J||_F^2 when dim(D) = r.
inline double truncation_bound(long n, double eta, int r) {
  const double nn = static_cast<double>(n);
  return 54.0 * nn * nn * eta * eta * static_cast<double>(r + 1);
}

namespace detail {

template <typename Scalar>
RankTruncatedFit<Scalar> truncate_kernel(const Matrix<Scalar>& kernel, int r) {
  const Eigen::Index n = kernel.rows();
  if (r < 1 || r > n - 1) throw DomainError("rank truncation: need 1 <= r <= n-1");
  const auto eig = sorted_eigen(kernel);
  Vector<Scalar> gamma = Vector<Scalar>::Zero(n);
  gamma.head(r) = eig.values.head(r).cwiseMax(Scalar(0));
  Matrix<Scalar> k_r = eig.vectors * gamma.asDiagonal() * eig.vectors.transpose();
  k_r = Scalar(0.5) * (k_r + k_r.transpose()).eval();

  Matrix<Scalar> coords = eig.vectors.leftCols(r) * gamma.head(r).cwiseSqrt().asDiagonal();
  auto embedding = Embedding<Scalar>::centered(std::move(coords));
  auto d_r = EdmMatrix<Scalar>::certify(SymHollowMatrix<Scalar>::from_upper(tau_matrix(k_r)));
  return {r, std::move(d_r), std::move(embedding)};
}

}  // namespace detail

/// Best rank-r approximation of the fitted kernel, mapped back to distances.
template <typename Scalar>
RankTruncatedFit<Scalar> truncate_rank(const ShrinkageFit<Scalar>& fit, int r) {
  return detail::truncate_kernel(fit.k_hat.matrix(), r);
}

/// Classical (Torgerson) scaling: top-r nonnegative eigenpairs of -JXJ/2.
template <typename Scalar>
RankTruncatedFit<Scalar> classical_mds(const SymHollowMatrix<Scalar>& x, int r) {
  Matrix<Scalar> kernel = Scalar(-0.5) * double_center(x.matrix());
  kernel = Scalar(0.5) * (kernel + kernel.transpose()).eval();
  return detail::truncate_kernel(kernel, r);
}

/// Spectral norm of a symmetric matrix by power iteration from the normalized
/// all-ones vector; stops when the estimate changes by <= tol (relative).
template <typename Derived>
typename Derived::Scalar spectral_norm(const Eigen::MatrixBase<Derived>& m, double tol = 1e-6,
                                       int max_iter = 1000) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = m.rows();
  Vector<Scalar> v = Vector<Scalar>::Ones(n) / std::sqrt(static_cast<Scalar>(n));
  Scalar estimate = 0;
  for (int it = 0; it < max_iter; ++it) {
    Vector<Scalar> w = m * v;
    const Scalar norm = w.norm();
    if (norm == Scalar(0)) return Scalar(0);
    const bool done = std::abs(norm - estimate) <= static_cast<Scalar>(tol) * norm;
    estimate = norm;
    v = w / norm;
    if (done) break;
  }
  return estimate;
}

}  // namespace edmshrink
