#pragma once

// Kernel <-> distance transforms, EDM membership, embeddings and error metrics.
// Distances are squared Euclidean distances throughout.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "edmshrink/errors.hpp"
#include "edmshrink/sorted_eigen.hpp"
#include "edmshrink/types.hpp"

namespace edmshrink {

/// T(M) = diag(M) 1' + 1 diag(M)' - 2M for any square matrix expression.
template <typename Derived>
Matrix<typename Derived::Scalar> tau_matrix(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = m.rows();
  const Vector<Scalar> d = m.diagonal();
  Matrix<Scalar> out(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) out(i, j) = d(i) + d(j) - Scalar(2) * m(i, j);
  return out;
}

/// Distances realized by a kernel: d_ij = k_ii + k_jj - 2 k_ij.
template <typename Scalar>
SymHollowMatrix<Scalar> tau_transform(const KernelMatrix<Scalar>& k) {
  return SymHollowMatrix<Scalar>::from_upper(tau_matrix(k.matrix()));
}

/// Minimum-trace kernel -JDJ/2 of a certified EDM. Throws InvalidMatrix if the
/// result is not PSD within the certification tolerance of `d`.
template <typename Scalar>
MinTraceKernel<Scalar> schoenberg_r(const EdmMatrix<Scalar>& d) {
  Matrix<Scalar> k = Scalar(-0.5) * double_center(d.matrix());
  k = Scalar(0.5) * (k + k.transpose()).eval();
  try {
    return MinTraceKernel<Scalar>(std::move(k), d.cert_tol());
  } catch (const InvalidMatrix& e) {
    throw InvalidMatrix(std::string("schoenberg_r: input was mis-certified: ") + e.what());
  }
}

struct EdmTest {
  bool is_edm = false;
  int embed_dim = 0;
};

/// Schoenberg criterion: all eigenvalues of -JMJ/2 are >= -tol * gamma_max.
/// embed_dim counts eigenvalues above tol * gamma_max.
template <typename Scalar>
EdmTest is_edm(const SymHollowMatrix<Scalar>& m, Scalar tol = Scalar(kDefaultCertTol)) {
  if (!(tol > Scalar(0))) throw DomainError("is_edm: tolerance must be positive");
  const auto spec = detail::schoenberg_spectrum(m.matrix(), tol, Scalar(0));
  return {spec.is_edm, spec.is_edm ? spec.embed_dim : 0};
}

/// Classical scaling coordinates U_r diag(sqrt(gamma)) of a centered kernel,
/// negative eigenvalues clipped to zero. Warns when gamma_{r+1} > tol * gamma_1.
template <typename Scalar>
Embedding<Scalar> extract_embedding(const MinTraceKernel<Scalar>& k, int r,
                                    Scalar tol = Scalar(kDefaultCertTol)) {
  const Eigen::Index n = k.n();
  if (r < 1 || r > n - 1) throw DomainError("extract_embedding: need 1 <= r <= n-1");
  const auto eig = sorted_eigen(k.matrix());
  const Vector<Scalar> gamma = eig.values.cwiseMax(Scalar(0));
  if (gamma(r) > tol * gamma(0)) {
    std::ostringstream msg;
    msg << "rank-" << r << " embedding discards eigenvalue " << gamma(r) << " (largest "
        << gamma(0) << ")";
    warn(msg.str());
  }
  Matrix<Scalar> coords =
      eig.vectors.leftCols(r) * gamma.head(r).cwiseSqrt().asDiagonal();
  return Embedding<Scalar>::centered(std::move(coords));
}

/// Squared pairwise distances between the rows of `points` (need not be centered).
template <typename Derived>
EdmMatrix<typename Derived::Scalar> edm_from_coords(const Eigen::MatrixBase<Derived>& points) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = points.rows();
  Matrix<Scalar> d = Matrix<Scalar>::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      d(i, j) = (points.row(i) - points.row(j)).squaredNorm();
  return EdmMatrix<Scalar>::certify(SymHollowMatrix<Scalar>::from_upper(std::move(d)));
}

template <typename Scalar>
EdmMatrix<Scalar> edm_from_coords(const Embedding<Scalar>& p) {
  return edm_from_coords(p.coords());
}

/// Gram matrix P P' of an embedding.
template <typename Scalar>
Matrix<Scalar> gram(const Embedding<Scalar>& p) {
  Matrix<Scalar> g = p.coords() * p.coords().transpose();
  return Scalar(0.5) * (g + g.transpose());
}

namespace detail {
template <typename Scalar>
void require_same_size(const SymHollowMatrix<Scalar>& a, const SymHollowMatrix<Scalar>& b,
                       const char* op) {
  if (a.n() != b.n())
    throw DimensionMismatch(std::string(op) + ": sizes " + std::to_string(a.n()) + " and " +
                            std::to_string(b.n()) + " differ");
}
}  // namespace detail

/// Mean squared error over distinct pairs: 2/(n(n-1)) * sum_{i<j} (a_ij - b_ij)^2.
template <typename Scalar>
Scalar loss_l(const SymHollowMatrix<Scalar>& a, const SymHollowMatrix<Scalar>& b) {
  detail::require_same_size(a, b, "loss_l");
  const Eigen::Index n = a.n();
  Scalar sum = 0;
  for (Eigen::Index j = 1; j < n; ++j)
    for (Eigen::Index i = 0; i < j; ++i) {
      const Scalar diff = a(i, j) - b(i, j);
      sum += diff * diff;
    }
  return Scalar(2) * sum / static_cast<Scalar>(n * (n - 1));
}

/// Relative Frobenius error ||est - truth||_F / ||truth||_F.
template <typename Scalar>
Scalar kruskal_stress(const SymHollowMatrix<Scalar>& est, const SymHollowMatrix<Scalar>& truth) {
  detail::require_same_size(est, truth, "kruskal_stress");
  const Scalar denom = truth.matrix().norm();
  if (denom == Scalar(0)) throw DomainError("kruskal_stress: reference matrix is all zero");
  return (est.matrix() - truth.matrix()).norm() / denom;
}

/// x_ij = s_ii + s_jj - 2 s_ij for a symmetric similarity matrix; no PSD requirement,
/// so the result need not be an EDM.
template <typename Derived>
SymHollowMatrix<typename Derived::Scalar> similarity_to_dissimilarity(
    const Eigen::MatrixBase<Derived>& s) {
  using Scalar = typename Derived::Scalar;
  if (s.rows() != s.cols()) throw InvalidMatrix("similarity matrix is not square");
  const Scalar scale = s.cwiseAbs().maxCoeff();
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12) * scale)
    throw InvalidMatrix("similarity matrix is not symmetric");
  const Matrix<Scalar> sym = Scalar(0.5) * (s + s.transpose());
  return SymHollowMatrix<Scalar>::from_upper(tau_matrix(sym));
}

}  // namespace edmshrink
