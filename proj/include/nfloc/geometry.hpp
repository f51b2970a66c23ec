#pragma once

// Coordinate systems and element placement for a uniform linear array.
//
// The array lies on the x axis with element n at (r_n, 0), r_n = n * spacing
// (0-based, so element 0 is the reference at the origin). A user at polar
// position (d, theta) sits at (d cos theta, d sin theta); theta in (0, pi)
// keeps users strictly in front of the array.

#include "nfloc/types.hpp"

#include <cmath>

namespace nfloc {

template <typename Scalar>
struct PolarT {
  Scalar d;      // m
  Scalar theta;  // rad
};

template <typename Scalar>
struct CartesianT {
  Scalar x;  // m
  Scalar y;  // m
};

using PolarPosition = PolarT<double>;
using CartesianPosition = CartesianT<double>;

inline bool operator==(const PolarPosition& a, const PolarPosition& b) {
  return a.d == b.d && a.theta == b.theta;
}

inline bool is_valid(const PolarPosition& p) {
  return std::isfinite(p.d) && std::isfinite(p.theta) && p.d > 0.0 && p.theta > 0.0 &&
         p.theta < kPi;
}

/// Checked constructor for a polar position.
inline PolarPosition make_polar(double d, double theta) {
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw Error(Errc::InvalidArgument, "distance must be positive and finite");
  }
  if (!(theta > 0.0 && theta < kPi)) {
    throw Error(Errc::AngleOutOfRange, "theta must lie in (0, pi)");
  }
  return {d, theta};
}

class ArrayGeometry {
 public:
  ArrayGeometry(Index n_antennas, double spacing) : n_antennas_(n_antennas), spacing_(spacing) {
    if (n_antennas < 1) throw Error(Errc::InvalidArgument, "array needs at least one element");
    if (!(spacing > 0.0)) throw Error(Errc::InvalidArgument, "element spacing must be positive");
  }

  Index size() const noexcept { return n_antennas_; }
  double spacing() const noexcept { return spacing_; }
  double aperture() const noexcept { return static_cast<double>(n_antennas_ - 1) * spacing_; }

  template <typename Scalar = double>
  Scalar offset(Index n) const {
    return static_cast<Scalar>(n) * static_cast<Scalar>(spacing_);
  }

  template <typename Scalar = double>
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> offsets() const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> r(n_antennas_);
    for (Index n = 0; n < n_antennas_; ++n) r(n) = offset<Scalar>(n);
    return r;
  }

 private:
  Index n_antennas_;
  double spacing_;
};

template <typename Scalar>
CartesianT<Scalar> polar_to_cartesian(const PolarT<Scalar>& p) {
  using std::cos;
  using std::sin;
  return {p.d * cos(p.theta), p.d * sin(p.theta)};
}

inline PolarPosition cartesian_to_polar(const CartesianPosition& c) {
  if (c.x == 0.0 && c.y == 0.0) {
    throw Error(Errc::OriginDegenerate, "(0, 0) has no polar angle");
  }
  const double theta = std::atan2(c.y, c.x);
  if (!(theta > 0.0 && theta < kPi)) {
    throw Error(Errc::AngleOutOfRange, "position lies behind or on the array axis");
  }
  return {std::hypot(c.x, c.y), theta};
}

/// Distance from a user to an element at offset r along the array axis.
template <typename Scalar>
Scalar element_distance(const PolarT<Scalar>& p, Scalar r) {
  using std::cos;
  using std::sqrt;
  return sqrt(r * r + p.d * p.d - Scalar(2) * r * p.d * cos(p.theta));
}

inline double element_distance(const PolarPosition& p, const ArrayGeometry& g, Index n) {
  if (n < 0 || n >= g.size()) throw Error(Errc::IndexOutOfRange, "element index out of range");
  return element_distance(p, g.offset(n));
}

/// 2 D^2 / lambda with D the first-to-last element aperture.
inline double fraunhofer_distance(const ArrayGeometry& g, double carrier_hz) {
  if (!(carrier_hz > 0.0)) throw Error(Errc::InvalidArgument, "carrier must be positive");
  const double wavelength = kSpeedOfLight / carrier_hz;
  const double D = g.aperture();
  return 2.0 * D * D / wavelength;
}

}  // namespace nfloc
