#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace edmshrink {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Eigendecomposition of a symmetric matrix with a reproducible layout:
/// eigenvalues in descending order (ties keep solver order), unit eigenvectors
/// whose first component of non-negligible magnitude is positive.
template <typename Scalar>
struct SortedEigen {
  Vector<Scalar> values;
  Matrix<Scalar> vectors;
};

template <typename Derived>
SortedEigen<typename Derived::Scalar> sorted_eigen(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = a.rows();
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(a.derived());

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto& ev = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&ev](Eigen::Index l, Eigen::Index r) { return ev(l) > ev(r); });

  SortedEigen<Scalar> out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto src = order[static_cast<std::size_t>(k)];
    out.values(k) = ev(src);
    out.vectors.col(k) = solver.eigenvectors().col(src);
  }

  // Sign convention: the first component that is not round-off noise is positive.
  const Scalar noise = Scalar(64) * std::numeric_limits<Scalar>::epsilon();
  for (Eigen::Index k = 0; k < n; ++k) {
    auto col = out.vectors.col(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(col(i)) > noise) {
        if (col(i) < Scalar(0)) col = -col;
        break;
      }
    }
  }
  return out;
}

/// Centering matrix J = I - 11'/n.
template <typename Scalar>
Matrix<Scalar> centering_matrix(Eigen::Index n) {
  return Matrix<Scalar>::Identity(n, n) -
         Matrix<Scalar>::Constant(n, n, Scalar(1) / static_cast<Scalar>(n));
}

/// J * A * J without forming J: subtract row and column means, add back the grand mean.
template <typename Derived>
Matrix<typename Derived::Scalar> double_center(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  const Vector<Scalar> row_mean = a.rowwise().mean();
  const Vector<Scalar> col_mean = a.colwise().mean().transpose();
  const Scalar grand = row_mean.mean();
  Matrix<Scalar> out = a;
  out.colwise() -= row_mean;
  out.rowwise() -= col_mean.transpose();
  out.array() += grand;
  return out;
}

}  // namespace edmshrink
