#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "edmshrink/errors.hpp"
#include "edmshrink/sorted_eigen.hpp"

namespace edmshrink {

/// Default relative tolerance for EDM certification and rank decisions.
inline constexpr double kDefaultCertTol = 1e-8;

/// Symmetric matrix with an exactly zero diagonal. Every "distance" matrix in
/// the library holds SQUARED Euclidean distances.
template <typename Scalar = double>
class SymHollowMatrix {
 public:
  using MatrixType = Matrix<Scalar>;

  /// Requires exact symmetry and an exactly zero diagonal, n >= 2.
  explicit SymHollowMatrix(MatrixType m) : m_(std::move(m)) {
    check_shape(m_);
    for (Eigen::Index i = 0; i < m_.rows(); ++i) {
      if (m_(i, i) != Scalar(0)) throw InvalidMatrix("diagonal entry is not zero");
      for (Eigen::Index j = 0; j < i; ++j)
        if (m_(i, j) != m_(j, i)) throw InvalidMatrix("matrix is not symmetric");
    }
  }

  /// Accepts asymmetry and diagonal entries up to `abs_tol`; symmetrizes by
  /// averaging and zeroes the diagonal. Rejects anything beyond the tolerance.
  static SymHollowMatrix from_approximate(MatrixType m, Scalar abs_tol) {
    check_shape(m);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (std::abs(m(i, i)) > abs_tol)
        throw InvalidMatrix("diagonal entry " + std::to_string(i) + " is not zero");
      for (Eigen::Index j = 0; j < i; ++j)
        if (std::abs(m(i, j) - m(j, i)) > abs_tol)
          throw InvalidMatrix("matrix is not symmetric at (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
    }
    return enforce(std::move(m), true);
  }

  /// Mirrors the upper triangle onto the lower one and zeroes the diagonal.
  /// For results that are symmetric hollow by construction.
  static SymHollowMatrix from_upper(MatrixType m) {
    check_shape(m);
    return enforce(std::move(m), false);
  }

  /// All-zero matrix of order n.
  static SymHollowMatrix zero(Eigen::Index n) { return SymHollowMatrix(MatrixType::Zero(n, n)); }

  /// Equilateral unit configuration D0: ones off the diagonal.
  static SymHollowMatrix ones(Eigen::Index n) {
    MatrixType m = MatrixType::Ones(n, n);
    m.diagonal().setZero();
    return SymHollowMatrix(std::move(m));
  }

  Eigen::Index n() const noexcept { return m_.rows(); }
  const MatrixType& matrix() const noexcept { return m_; }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  struct Trusted {};
  SymHollowMatrix(Trusted, MatrixType m) : m_(std::move(m)) {}

  static void check_shape(const MatrixType& m) {
    if (m.rows() != m.cols()) throw InvalidMatrix("matrix is not square");
    if (m.rows() < 2) throw InvalidMatrix("need at least two objects");
    if (!m.allFinite()) throw InvalidMatrix("matrix has non-finite entries");
  }

  static SymHollowMatrix enforce(MatrixType m, bool average) {
    const Eigen::Index n = m.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
      m(i, i) = Scalar(0);
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const Scalar v = average ? (m(i, j) + m(j, i)) / Scalar(2) : m(i, j);
        m(i, j) = v;
        m(j, i) = v;
      }
    }
    return SymHollowMatrix(Trusted{}, std::move(m));
  }

  MatrixType m_;
};

/// Outcome of the Schoenberg test on -JMJ/2.
template <typename Scalar>
struct SchoenbergSpectrum {
  bool is_edm = false;
  int embed_dim = 0;
  Scalar gamma_max = 0;
  Scalar gamma_min = 0;
};

namespace detail {

// Threshold = max(tol * gamma_max, abs_floor); gamma_max clipped at 0.
template <typename Scalar>
SchoenbergSpectrum<Scalar> schoenberg_spectrum(const Matrix<Scalar>& m, Scalar tol,
                                               Scalar abs_floor) {
  const Matrix<Scalar> kernel = Scalar(-0.5) * double_center(m);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(kernel, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  SchoenbergSpectrum<Scalar> out;
  out.gamma_max = ev.maxCoeff();
  out.gamma_min = ev.minCoeff();
  const Scalar threshold = std::max(tol * std::max(out.gamma_max, Scalar(0)), abs_floor);
  out.is_edm = out.gamma_min >= -threshold;
  out.embed_dim = static_cast<int>((ev.array() > threshold).count());
  return out;
}

}  // namespace detail

/// A symmetric hollow matrix certified to lie in the EDM cone.
template <typename Scalar = double>
class EdmMatrix {
 public:
  /// Certifies membership with relative tolerance `tol` (and an optional absolute
  /// eigenvalue floor for results whose scale is set elsewhere). Throws
  /// InvalidMatrix when `m` is not an EDM.
  static EdmMatrix certify(SymHollowMatrix<Scalar> m, Scalar tol = Scalar(kDefaultCertTol),
                           Scalar abs_floor = Scalar(0)) {
    const auto spec = detail::schoenberg_spectrum(m.matrix(), tol, abs_floor);
    if (!spec.is_edm)
      throw InvalidMatrix("matrix is not a Euclidean distance matrix (min eigenvalue of -JMJ/2 = " +
                          std::to_string(spec.gamma_min) + ")");
    const Scalar entry_floor = -std::max(tol * std::max(spec.gamma_max, Scalar(0)), abs_floor);
    const Eigen::Index n = m.n();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j)
        if (m(i, j) < entry_floor) throw InvalidMatrix("negative squared distance");
    return EdmMatrix(std::move(m), spec.embed_dim, tol);
  }

  const SymHollowMatrix<Scalar>& base() const noexcept { return base_; }
  const Matrix<Scalar>& matrix() const noexcept { return base_.matrix(); }
  Eigen::Index n() const noexcept { return base_.n(); }
  int embed_dim() const noexcept { return embed_dim_; }
  Scalar cert_tol() const noexcept { return cert_tol_; }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return base_(i, j); }

  operator const SymHollowMatrix<Scalar>&() const noexcept { return base_; }

 private:
  EdmMatrix(SymHollowMatrix<Scalar> base, int dim, Scalar tol)
      : base_(std::move(base)), embed_dim_(dim), cert_tol_(tol) {}

  SymHollowMatrix<Scalar> base_;
  int embed_dim_;
  Scalar cert_tol_;
};

/// Symmetric positive semidefinite Gram matrix.
template <typename Scalar = double>
class KernelMatrix {
 public:
  using MatrixType = Matrix<Scalar>;

  /// Symmetry is required to 1e-12 relative (then enforced exactly); the smallest
  /// eigenvalue must be >= -psd_tol * largest.
  explicit KernelMatrix(MatrixType k, Scalar psd_tol = Scalar(kDefaultCertTol))
      : k_(std::move(k)), psd_tol_(psd_tol) {
    if (k_.rows() != k_.cols()) throw InvalidMatrix("kernel is not square");
    if (k_.rows() < 1) throw InvalidMatrix("empty kernel");
    if (!k_.allFinite()) throw InvalidMatrix("kernel has non-finite entries");
    const Scalar scale = k_.cwiseAbs().maxCoeff();
    if ((k_ - k_.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12) * scale)
      throw InvalidMatrix("kernel is not symmetric");
    k_ = Scalar(0.5) * (k_ + k_.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixType> solver(k_, Eigen::EigenvaluesOnly);
    const Scalar top = std::max(solver.eigenvalues().maxCoeff(), Scalar(0));
    const Scalar roundoff =
        static_cast<Scalar>(k_.rows()) * std::numeric_limits<Scalar>::epsilon() * scale;
    if (solver.eigenvalues().minCoeff() < -(psd_tol_ * top + roundoff))
      throw InvalidMatrix("kernel is not positive semidefinite");
  }

  Eigen::Index n() const noexcept { return k_.rows(); }
  const MatrixType& matrix() const noexcept { return k_; }
  Scalar psd_tol() const noexcept { return psd_tol_; }
  Scalar trace() const { return k_.trace(); }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return k_(i, j); }

 private:
  MatrixType k_;
  Scalar psd_tol_;
};

/// PSD kernel with the all-ones vector in its null space (centered points).
template <typename Scalar = double>
class MinTraceKernel : public KernelMatrix<Scalar> {
 public:
  using typename KernelMatrix<Scalar>::MatrixType;

  explicit MinTraceKernel(MatrixType k, Scalar psd_tol = Scalar(kDefaultCertTol))
      : KernelMatrix<Scalar>(std::move(k), psd_tol) {
    const Scalar row_sum = this->matrix().rowwise().sum().cwiseAbs().maxCoeff();
    const Scalar scale = std::max(this->trace(), this->matrix().cwiseAbs().maxCoeff());
    if (row_sum > psd_tol * scale) throw InvalidMatrix("kernel rows do not sum to zero");
  }
};

/// n x k centered point coordinates (plain, not squared, distance units).
template <typename Scalar = double>
class Embedding {
 public:
  using MatrixType = Matrix<Scalar>;

  /// Requires column sums of zero within 1e-10 * max |coord|.
  explicit Embedding(MatrixType coords) : coords_(std::move(coords)) {
    if (coords_.rows() < 1) throw InvalidMatrix("embedding has no points");
    if (coords_.cols() == 0) return;
    const Scalar scale = coords_.cwiseAbs().maxCoeff();
    const Scalar drift = coords_.colwise().sum().cwiseAbs().maxCoeff();
    if (drift > Scalar(1e-10) * scale)
      throw InvalidMatrix("embedding is not centered");
  }

  /// Subtracts the centroid from arbitrary coordinates.
  static Embedding centered(MatrixType coords) {
    if (coords.rows() > 0 && coords.cols() > 0)
      coords.rowwise() -= coords.colwise().mean();
    return Embedding(std::move(coords));
  }

  Eigen::Index n() const noexcept { return coords_.rows(); }
  Eigen::Index k() const noexcept { return coords_.cols(); }
  const MatrixType& coords() const noexcept { return coords_; }

 private:
  MatrixType coords_;
};

}  // namespace edmshrink
