#pragma once

// Eigenpairs of a dense symmetric matrix restricted to one side of zero.
//
// Reduction to tridiagonal form (Eigen::Tridiagonalization), Sturm-sequence
// bisection for the selected eigenvalues, inverse iteration for their
// eigenvectors (modified Gram-Schmidt inside clusters), and back-transformation
// by the Householder sequence. Cost is one tridiagonalization plus O(n^2 k)
// for k selected pairs, against the O(n^3) eigenvector accumulation of a full
// QR-based solve.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "edmshrink/sorted_eigen.hpp"

namespace edmshrink {

enum class SpectrumSide { negative, positive };

template <typename Scalar>
struct PartialEigen {
  Vector<Scalar> values;    ///< ascending
  Matrix<Scalar> vectors;   ///< orthonormal columns matching `values`
  Eigen::Index negatives = 0;  ///< eigenvalues < 0 in the whole spectrum
};

namespace detail {

// Number of eigenvalues of the unreduced tridiagonal block [lo, hi) below x.
template <typename Scalar>
Eigen::Index sturm_count(const Vector<Scalar>& d, const Vector<Scalar>& e, Eigen::Index lo,
                         Eigen::Index hi, Scalar x, Scalar pivmin) {
  Eigen::Index count = 0;
  Scalar q = d(lo) - x;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0) ++count;
  for (Eigen::Index i = lo + 1; i < hi; ++i) {
    q = d(i) - x - e(i - 1) * e(i - 1) / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0) ++count;
  }
  return count;
}

// Solves (T - shift I) x = b in place for the block [lo, hi) using the
// partial-pivoting LU of a tridiagonal matrix. Zero pivots are perturbed.
template <typename Scalar>
class ShiftedTridiagonalLU {
 public:
  ShiftedTridiagonalLU(const Vector<Scalar>& d, const Vector<Scalar>& e, Eigen::Index lo,
                       Eigen::Index hi, Scalar shift, Scalar tiny)
      : n_(hi - lo), dl_(n_), dd_(n_), du_(n_), du2_(n_), swap_(static_cast<std::size_t>(n_)) {
    for (Eigen::Index i = 0; i < n_; ++i) dd_(i) = d(lo + i) - shift;
    for (Eigen::Index i = 0; i + 1 < n_; ++i) {
      dl_(i) = e(lo + i);
      du_(i) = e(lo + i);
    }
    du2_.setZero();
    for (Eigen::Index i = 0; i + 1 < n_; ++i) {
      const bool interchange = std::abs(dd_(i)) < std::abs(dl_(i));
      swap_[static_cast<std::size_t>(i)] = interchange;
      if (!interchange) {
        if (dd_(i) == Scalar(0)) dd_(i) = tiny;
        const Scalar fact = dl_(i) / dd_(i);
        dl_(i) = fact;
        dd_(i + 1) -= fact * du_(i);
      } else {
        const Scalar fact = dd_(i) / dl_(i);
        dd_(i) = dl_(i);
        dl_(i) = fact;
        const Scalar temp = du_(i);
        du_(i) = dd_(i + 1);
        dd_(i + 1) = temp - fact * dd_(i + 1);
        if (i + 2 < n_) {
          du2_(i) = du_(i + 1);
          du_(i + 1) = -fact * du_(i + 1);
        }
      }
    }
    for (Eigen::Index i = 0; i < n_; ++i)
      if (dd_(i) == Scalar(0)) dd_(i) = tiny;
  }

  void solve(Vector<Scalar>& b) const {
    for (Eigen::Index i = 0; i + 1 < n_; ++i) {
      if (!swap_[static_cast<std::size_t>(i)]) {
        b(i + 1) -= dl_(i) * b(i);
      } else {
        const Scalar temp = b(i) - dl_(i) * b(i + 1);
        b(i) = b(i + 1);
        b(i + 1) = temp;
      }
    }
    b(n_ - 1) /= dd_(n_ - 1);
    if (n_ > 1) b(n_ - 2) = (b(n_ - 2) - du_(n_ - 2) * b(n_ - 1)) / dd_(n_ - 2);
    for (Eigen::Index i = n_ - 3; i >= 0; --i)
      b(i) = (b(i) - du_(i) * b(i + 1) - du2_(i) * b(i + 2)) / dd_(i);
  }

 private:
  Eigen::Index n_;
  Vector<Scalar> dl_, dd_, du_, du2_;
  std::vector<bool> swap_;
};

// Deterministic start vector with no special structure.
template <typename Scalar>
Vector<Scalar> start_vector(Eigen::Index n, Eigen::Index salt) {
  Vector<Scalar> v(n);
  std::uint64_t state = 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(salt + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    state ^= state >> 12;
    state ^= state << 25;
    state ^= state >> 27;
    const std::uint64_t r = state * 0x2545F4914F6CDD1DULL;
    v(i) = Scalar(0.5) + static_cast<Scalar>(r >> 11) * Scalar(0x1.0p-53);
  }
  return v;
}

// Selected eigenpairs of the symmetric tridiagonal (d, e), eigenvectors in the
// tridiagonal basis.
template <typename Scalar>
PartialEigen<Scalar> tridiagonal_side(const Vector<Scalar>& d, const Vector<Scalar>& e,
                                      SpectrumSide side) {
  const Eigen::Index m = d.size();
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  Scalar tnorm = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    Scalar row = std::abs(d(i));
    if (i > 0) row += std::abs(e(i - 1));
    if (i + 1 < m) row += std::abs(e(i));
    tnorm = std::max(tnorm, row);
  }

  PartialEigen<Scalar> out;
  out.values.resize(0);
  out.vectors.setZero(m, 0);
  if (tnorm == Scalar(0)) return out;

  const Scalar pivmin = std::numeric_limits<Scalar>::min() * std::max(tnorm * tnorm, Scalar(1));
  const Scalar cluster_gap = Scalar(1e-3) * tnorm;
  const Scalar tiny = eps * tnorm;

  std::vector<Scalar> values;
  std::vector<Vector<Scalar>> vectors;

  Eigen::Index lo = 0;
  while (lo < m) {
    Eigen::Index hi = lo + 1;
    while (hi < m && std::abs(e(hi - 1)) > eps * tnorm) ++hi;
    const Eigen::Index size = hi - lo;

    const Eigen::Index below_zero = sturm_count(d, e, lo, hi, Scalar(0), pivmin);
    out.negatives += below_zero;
    const Eigen::Index first = side == SpectrumSide::negative ? 0 : below_zero;
    const Eigen::Index last = side == SpectrumSide::negative ? below_zero : size;

    Eigen::Index cluster_start = static_cast<Eigen::Index>(vectors.size());
    Scalar previous = std::numeric_limits<Scalar>::quiet_NaN();
    for (Eigen::Index idx = first; idx < last; ++idx) {
      // Bisection for the idx-th smallest eigenvalue of the block.
      Scalar left = side == SpectrumSide::negative ? -tnorm - tiny : Scalar(0);
      Scalar right = side == SpectrumSide::negative ? Scalar(0) : tnorm + tiny;
      for (int it = 0; it < 200; ++it) {
        const Scalar mid = Scalar(0.5) * (left + right);
        if (right - left <= Scalar(2) * eps * std::max(std::abs(left), std::abs(right)) + pivmin)
          break;
        if (sturm_count(d, e, lo, hi, mid, pivmin) > idx)
          right = mid;
        else
          left = mid;
      }
      const Scalar lambda = Scalar(0.5) * (left + right);
      if (size == 1) {
        Vector<Scalar> v = Vector<Scalar>::Zero(m);
        v(lo) = Scalar(1);
        values.push_back(lambda);
        vectors.push_back(std::move(v));
        continue;
      }

      if (!(std::abs(lambda - previous) <= cluster_gap))
        cluster_start = static_cast<Eigen::Index>(vectors.size());
      previous = lambda;

      const ShiftedTridiagonalLU<Scalar> lu(d, e, lo, hi, lambda, tiny);
      Vector<Scalar> x = start_vector<Scalar>(size, idx);
      for (int it = 0; it < 5; ++it) {
        x /= x.cwiseAbs().sum();
        lu.solve(x);
        for (auto k = cluster_start; k < static_cast<Eigen::Index>(vectors.size()); ++k) {
          const auto& prev = vectors[static_cast<std::size_t>(k)];
          x -= prev.segment(lo, size).dot(x) * prev.segment(lo, size);
        }
        x.normalize();
      }
      Vector<Scalar> v = Vector<Scalar>::Zero(m);
      v.segment(lo, size) = x;
      values.push_back(lambda);
      vectors.push_back(std::move(v));
    }
    lo = hi;
  }

  // Blocks are processed in index order; sort the selection by value.
  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&values](std::size_t l, std::size_t r) { return values[l] < values[r]; });
  const auto k = static_cast<Eigen::Index>(values.size());
  out.values.resize(k);
  out.vectors.resize(m, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto src = order[static_cast<std::size_t>(i)];
    out.values(i) = values[src];
    out.vectors.col(i) = vectors[src];
  }
  return out;
}

}  // namespace detail

/// Eigenpairs of the symmetric matrix `a` with strictly negative (or strictly
/// positive) eigenvalues. `negatives` always reports the full negative count.
template <typename Derived>
PartialEigen<typename Derived::Scalar> partial_eigen(const Eigen::MatrixBase<Derived>& a,
                                                     SpectrumSide side) {
  using Scalar = typename Derived::Scalar;
  Eigen::Tridiagonalization<Matrix<Scalar>> tri(a.derived());
  const Vector<Scalar> d = tri.diagonal();
  Vector<Scalar> e = tri.subDiagonal();
  if (e.size() == 0) e.resize(0);
  auto out = detail::tridiagonal_side<Scalar>(d, e, side);
  if (out.vectors.cols() > 0) out.vectors = tri.matrixQ() * out.vectors;
  return out;
}

}  // namespace edmshrink
