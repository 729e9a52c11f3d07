#pragma once

#include <random>

#include "edmshrink/edm_core.hpp"
#include "edmshrink/types.hpp"

namespace testing_support {

using edmshrink::Matrix;
using edmshrink::Vector;

inline Matrix<double> gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng,
                                      double sd = 1.0) {
  std::normal_distribution<double> normal(0.0, sd);
  Matrix<double> m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

/// Centered Gaussian point cloud.
inline Matrix<double> random_cloud(Eigen::Index n, Eigen::Index k, std::mt19937_64& rng) {
  Matrix<double> p = gaussian_matrix(n, k, rng);
  p.rowwise() -= p.colwise().mean();
  return p;
}

inline edmshrink::EdmMatrix<double> random_edm(Eigen::Index n, Eigen::Index k,
                                               std::mt19937_64& rng) {
  return edmshrink::edm_from_coords(random_cloud(n, k, rng));
}

inline Matrix<double> random_symmetric(Eigen::Index n, std::mt19937_64& rng, double sd = 1.0) {
  const Matrix<double> g = gaussian_matrix(n, n, rng, sd);
  return 0.5 * (g + g.transpose());
}

inline edmshrink::SymHollowMatrix<double> random_hollow(Eigen::Index n, std::mt19937_64& rng,
                                                        double sd = 1.0) {
  Matrix<double> m = random_symmetric(n, rng, sd);
  m.diagonal().setZero();
  return edmshrink::SymHollowMatrix<double>(m);
}

inline double rel_err(const Matrix<double>& a, const Matrix<double>& b) {
  return (a - b).norm() / std::max(1e-300, b.norm());
}

}  // namespace testing_support
