#pragma once

#include "edmshrink/sorted_eigen.hpp"

namespace edmshrink {

/// Points along a circular helix about the z axis.
struct HelixSpec {
  long n = 100;
  double turns = 10.0;   ///< full revolutions over the n points
  double radius = 0.23;  ///< nm
  double pitch = 0.54;   ///< rise per revolution, nm
};

/// n x 3 coordinates; point i sits at angle 2*pi*turns*i/n and height pitch*turns*i/n.
Matrix<double> helix_coords(const HelixSpec& spec);

/// Default benchmark geometry: n points over 10 turns, radius 0.23 nm, pitch 0.54 nm.
Matrix<double> synthetic_helix(long n);

/// Helix with alpha-helix proportions (3.6 points per turn, 5.4 A pitch, 2.3 A radius).
Matrix<double> alpha_helix(long n);

}  // namespace edmshrink
