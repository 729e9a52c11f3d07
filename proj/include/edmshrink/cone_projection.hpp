#pragma once

// Frobenius projection onto the EDM cone D_n = C1 ∩ C2 with
//   C1 = {M : JMJ ⪯ 0}      (negative semidefinite on 1-orthogonal vectors)
//   C2 = {M : diag(M) = 0}  (hollow)
// computed by Dykstra's alternating projections.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "edmshrink/edm_core.hpp"
#include "edmshrink/errors.hpp"
#include "edmshrink/partial_eigen.hpp"
#include "edmshrink/sorted_eigen.hpp"
#include "edmshrink/types.hpp"

namespace edmshrink {

/// Symmetric orthogonal reflection Q = I - v v' / (n + sqrt(n)),
/// v = (1, ..., 1, 1 + sqrt(n)). Sends the all-ones vector to -sqrt(n) e_n.
template <typename Scalar = double>
class HouseholderQ {
 public:
  explicit HouseholderQ(Eigen::Index n) : n_(n) {
    if (n < 2) throw DomainError("householder_q: need n >= 2");
    const Scalar root = std::sqrt(static_cast<Scalar>(n));
    v_ = Vector<Scalar>::Ones(n);
    v_(n - 1) += root;
    beta_ = Scalar(1) / (static_cast<Scalar>(n) + root);
  }

  Eigen::Index n() const noexcept { return n_; }
  const Vector<Scalar>& v() const noexcept { return v_; }
  Scalar beta() const noexcept { return beta_; }

  Matrix<Scalar> matrix() const {
    return Matrix<Scalar>::Identity(n_, n_) - beta_ * v_ * v_.transpose();
  }

  /// Q A Q in O(n^2) via two rank-one updates.
  template <typename Derived>
  Matrix<Scalar> conjugate(const Eigen::MatrixBase<Derived>& a) const {
    Matrix<Scalar> qa = a;
    const Vector<Scalar> va = (v_.transpose() * qa).transpose();
    qa.noalias() -= beta_ * v_ * va.transpose();
    const Vector<Scalar> qav = qa * v_;
    qa.noalias() -= beta_ * qav * v_.transpose();
    return qa;
  }

 private:
  Eigen::Index n_;
  Vector<Scalar> v_;
  Scalar beta_;
};

template <typename Scalar = double>
HouseholderQ<Scalar> householder_q(Eigen::Index n) {
  return HouseholderQ<Scalar>(n);
}

/// Replaces a symmetric matrix by its projection onto the negative semidefinite
/// cone, U min(Gamma, 0) U'. Large blocks compute only the eigenpairs on the
/// smaller side of zero, with the side chosen from the previous call's count,
/// so one instance should follow one iteration.
template <typename Scalar>
class NsdProjector {
 public:
  /// Blocks smaller than this use the full symmetric eigensolver.
  static constexpr Eigen::Index kPartialThreshold = 32;

  void operator()(Eigen::Ref<Matrix<Scalar>> block) {
    const Eigen::Index m = block.rows();
    if (m < kPartialThreshold) {
      Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(block);
      const Vector<Scalar> clipped = solver.eigenvalues().cwiseMin(Scalar(0));
      negatives_ = static_cast<Eigen::Index>((solver.eigenvalues().array() < Scalar(0)).count());
      block.noalias() =
          solver.eigenvectors() * clipped.asDiagonal() * solver.eigenvectors().transpose();
      return;
    }
    const bool want_negative = negatives_ <= m / 2;
    const auto eig =
        partial_eigen(block, want_negative ? SpectrumSide::negative : SpectrumSide::positive);
    negatives_ = eig.negatives;
    const Matrix<Scalar> low_rank = eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose();
    if (want_negative)
      block = low_rank;
    else
      block -= low_rank;
  }

  /// Number of negative eigenvalues seen on the last call.
  Eigen::Index negatives() const noexcept { return negatives_; }

 private:
  Eigen::Index negatives_ = 0;
};

/// Projection onto C1: in the Householder frame, replace the leading
/// (n-1)x(n-1) block by its projection onto the negative semidefinite cone.
template <typename Derived>
Matrix<typename Derived::Scalar> project_c1(const Eigen::MatrixBase<Derived>& a,
                                            const HouseholderQ<typename Derived::Scalar>& q,
                                            NsdProjector<typename Derived::Scalar>& nsd) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index m = a.rows() - 1;
  Matrix<Scalar> b = q.conjugate(a);
  nsd(b.topLeftCorner(m, m));
  Matrix<Scalar> out = q.conjugate(b);
  return Scalar(0.5) * (out + out.transpose());
}

template <typename Derived>
Matrix<typename Derived::Scalar> project_c1(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  NsdProjector<Scalar> nsd;
  return project_c1(a, HouseholderQ<Scalar>(a.rows()), nsd);
}

/// Projection onto C2: zero the diagonal.
template <typename Derived>
Matrix<typename Derived::Scalar> project_c2(const Eigen::MatrixBase<Derived>& a) {
  Matrix<typename Derived::Scalar> out = a;
  out.diagonal().setZero();
  return out;
}

struct DykstraConfig {
  double tol = 1e-9;         ///< cycle-to-cycle change, relative to max(1, ||A||_F)
  int max_cycles = 5000;
  double feas_tol = 1e-7;    ///< feasibility residuals, relative to max(1, ||A||_F)

  void validate() const {
    if (!(tol > 0) || !(feas_tol > 0) || max_cycles <= 0)
      throw DomainError("DykstraConfig: all fields must be positive");
  }
};

struct ProjectionDiagnostics {
  int cycles = 0;
  double delta_last = 0;    ///< ||x_{k+1} - x_k||_F of the last cycle
  double c1_residual = 0;   ///< largest positive eigenvalue of the C1 block of the result
  double c2_residual = 0;   ///< max |diagonal| of the last C1 iterate
  bool converged = false;
};

/// Dykstra did not meet its tolerances within max_cycles.
class NotConverged : public Error {
 public:
  explicit NotConverged(const ProjectionDiagnostics& diag)
      : Error(describe(diag)), diag_(diag) {}

  const ProjectionDiagnostics& diagnostics() const noexcept { return diag_; }

 private:
  static std::string describe(const ProjectionDiagnostics& d) {
    std::ostringstream os;
    os << "EDM projection did not converge after " << d.cycles << " cycles (delta "
       << d.delta_last << ", C1 residual " << d.c1_residual << ", C2 residual "
       << d.c2_residual << ")";
    return os.str();
  }

  ProjectionDiagnostics diag_;
};

template <typename Scalar>
struct ConeProjection {
  EdmMatrix<Scalar> edm;
  ProjectionDiagnostics diagnostics;
};

namespace detail {

// Largest eigenvalue of the leading (n-1)x(n-1) block of QAQ, clipped at 0.
template <typename Scalar>
Scalar c1_violation(const Matrix<Scalar>& a, const HouseholderQ<Scalar>& q) {
  const Eigen::Index m = a.rows() - 1;
  const Matrix<Scalar> b = q.conjugate(a);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(b.topLeftCorner(m, m),
                                                       Eigen::EigenvaluesOnly);
  return std::max(solver.eigenvalues().maxCoeff(), Scalar(0));
}

// Maps a hollow, numerically-near-EDM iterate to an exact EDM: eigenvalues of
// -JXJ/2 at or below `floor` are zeroed and the kernel is mapped back through T.
template <typename Scalar>
Matrix<Scalar> snap_to_edm(const Matrix<Scalar>& x, Scalar floor) {
  const Matrix<Scalar> kernel = Scalar(-0.5) * double_center(x);
  const auto eig = sorted_eigen(kernel);
  Vector<Scalar> gamma = eig.values;
  for (Eigen::Index i = 0; i < gamma.size(); ++i)
    if (gamma(i) <= floor) gamma(i) = Scalar(0);
  const Matrix<Scalar> k = eig.vectors * gamma.asDiagonal() * eig.vectors.transpose();
  return tau_matrix(Scalar(0.5) * (k + k.transpose()));
}

}  // namespace detail

/// Frobenius-nearest EDM to a symmetric matrix (hollowness not required).
/// Throws NotConverged when the iteration budget is exhausted.
template <typename Derived>
ConeProjection<typename Derived::Scalar> project_edm_cone(const Eigen::MatrixBase<Derived>& input,
                                                          const DykstraConfig& cfg = {}) {
  using Scalar = typename Derived::Scalar;
  cfg.validate();
  const Eigen::Index n = input.rows();
  if (n != input.cols()) throw InvalidMatrix("project_edm_cone: matrix is not square");
  if (n < 2) throw InvalidMatrix("project_edm_cone: need n >= 2");
  const Matrix<Scalar> a = Scalar(0.5) * (input + input.transpose());
  if (!a.allFinite()) throw InvalidMatrix("project_edm_cone: non-finite entries");

  const HouseholderQ<Scalar> q(n);
  const Scalar scale = std::max(Scalar(1), a.norm());
  const Scalar step_tol = static_cast<Scalar>(cfg.tol) * scale;
  const Scalar feas_tol = static_cast<Scalar>(cfg.feas_tol) * scale;

  NsdProjector<Scalar> nsd;
  Matrix<Scalar> x = a;
  Matrix<Scalar> p = Matrix<Scalar>::Zero(n, n);
  Matrix<Scalar> qinc = Matrix<Scalar>::Zero(n, n);
  Matrix<Scalar> s(n, n);
  Matrix<Scalar> x_next(n, n);

  ProjectionDiagnostics diag;
  for (int cycle = 1; cycle <= cfg.max_cycles; ++cycle) {
    s = project_c1(x + p, q, nsd);
    p += x - s;
    x_next = project_c2(s + qinc);
    qinc += s - x_next;

    diag.cycles = cycle;
    diag.delta_last = static_cast<double>((x_next - x).norm());
    x.swap(x_next);

    if (diag.delta_last <= step_tol) {
      diag.c2_residual = static_cast<double>(s.diagonal().cwiseAbs().maxCoeff());
      if (diag.c2_residual > feas_tol) continue;
      diag.c1_residual = static_cast<double>(detail::c1_violation(x, q));
      if (diag.c1_residual <= feas_tol) {
        diag.converged = true;
        break;
      }
    }
  }
  if (!diag.converged) {
    diag.c2_residual = static_cast<double>(s.diagonal().cwiseAbs().maxCoeff());
    diag.c1_residual = static_cast<double>(detail::c1_violation(x, q));
    throw NotConverged(diag);
  }

  // Off-diagonal entries within the feasibility tolerance below zero are round-off.
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (i != j && x(i, j) < Scalar(0) && x(i, j) >= -feas_tol) x(i, j) = Scalar(0);

  const Scalar floor = feas_tol;
  Matrix<Scalar> snapped = detail::snap_to_edm(x, floor);
  auto hollow = SymHollowMatrix<Scalar>::from_upper(std::move(snapped));
  return {EdmMatrix<Scalar>::certify(std::move(hollow), Scalar(kDefaultCertTol), floor), diag};
}

/// Closed-form n = 3 analysis: eigenvalues of the Householder block and the
/// embedding dimension of the projection, plus the shrinkage amounts at which
/// the projection of X - eta*D0 drops to dimension 1 and to dimension 0.
struct Dim3Analysis {
  double delta_x = 0;
  double alpha1 = 0;
  double alpha2 = 0;
  int dim = 0;
  double eta_to_dim1 = 0;
  double eta_to_dim0 = 0;
};

template <typename Scalar>
Dim3Analysis analyze_dim3(const SymHollowMatrix<Scalar>& x) {
  if (x.n() != 3) throw DomainError("analyze_dim3: need n = 3");
  const double x12 = static_cast<double>(x(0, 1));
  const double x13 = static_cast<double>(x(0, 2));
  const double x23 = static_cast<double>(x(1, 2));
  const double sum = x12 + x13 + x23;
  const double a = x12 - x13;
  const double b = x12 - x23;
  const double c = x13 - x23;

  Dim3Analysis out;
  out.delta_x = std::sqrt(2.0 * (a * a + b * b + c * c));
  out.alpha1 = (sum + out.delta_x) / 3.0;
  out.alpha2 = (sum - out.delta_x) / 3.0;

  // Boundary cases resolve toward the lower dimension.
  const double knife = 1e-9 * std::max(std::abs(sum), out.delta_x);
  if (sum > out.delta_x + knife)
    out.dim = 2;
  else if (sum > -0.5 * out.delta_x + knife)
    out.dim = 1;
  else
    out.dim = 0;

  // Shrinking by eta lowers the sum by 3*eta and leaves delta_x unchanged.
  out.eta_to_dim1 = (sum - out.delta_x) / 3.0;
  out.eta_to_dim0 = (sum + 0.5 * out.delta_x) / 3.0;
  return out;
}

}  // namespace edmshrink
