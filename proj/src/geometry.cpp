#include "edmshrink/geometry.hpp"

#include <cmath>
#include <numbers>

#include "edmshrink/errors.hpp"

namespace edmshrink {

Matrix<double> helix_coords(const HelixSpec& spec) {
  if (spec.n < 2) throw DomainError("helix needs at least two points");
  Matrix<double> p(spec.n, 3);
  for (long i = 0; i < spec.n; ++i) {
    const double t = spec.turns * static_cast<double>(i) / static_cast<double>(spec.n);
    const double angle = 2.0 * std::numbers::pi * t;
    p(i, 0) = spec.radius * std::cos(angle);
    p(i, 1) = spec.radius * std::sin(angle);
    p(i, 2) = spec.pitch * t;
  }
  return p;
}

Matrix<double> synthetic_helix(long n) {
  HelixSpec spec;
  spec.n = n;
  return helix_coords(spec);
}

Matrix<double> alpha_helix(long n) {
  return helix_coords({n, static_cast<double>(n) / 3.6, 2.3, 5.4});
}

}  // namespace edmshrink
