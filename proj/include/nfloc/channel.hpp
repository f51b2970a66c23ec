#pragma once

// Wideband near-field channel: subcarrier grid, spherical-wavefront steering
// vectors and their parameter derivatives, noise levels and snapshot synthesis.

#include "nfloc/geometry.hpp"
#include "nfloc/types.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace nfloc {

struct BandPlan {
  double carrier = 0.0;    // Hz
  double bandwidth = 0.0;  // Hz
  VectorXd freqs;          // Hz, strictly increasing

  Index size() const noexcept { return freqs.size(); }
  /// Uniform subcarrier spacing (0 for a single carrier).
  double step() const noexcept {
    return freqs.size() > 1 ? bandwidth / static_cast<double>(freqs.size() - 1) : 0.0;
  }
};

/// Uniform grid over [f_c - B/2, f_c + B/2] with both endpoints included.
BandPlan subcarrier_frequencies(double carrier, double bandwidth, Index n_subcarriers);

template <typename Scalar>
Scalar path_gain(Scalar freq, Scalar distance) {
  return static_cast<Scalar>(kSpeedOfLight) /
         (Scalar(4) * std::numbers::pi_v<Scalar> * freq * distance);
}

/// Unwrapped propagation phase 2 pi f d / c.
template <typename Scalar>
Scalar wave_phase(Scalar freq, Scalar distance) {
  return Scalar(2) * std::numbers::pi_v<Scalar> * freq * distance /
         static_cast<Scalar>(kSpeedOfLight);
}

/// Steering column alpha * exp(-j v_n) for one user and one subcarrier.
template <typename Scalar>
VectorC<Scalar> steering_vector(Scalar freq, const PolarT<Scalar>& p, const ArrayGeometry& g) {
  const Scalar alpha = path_gain(freq, p.d);
  VectorC<Scalar> s(g.size());
  for (Index n = 0; n < g.size(); ++n) {
    const Scalar v = wave_phase(freq, element_distance(p, g.offset<Scalar>(n)));
    s(n) = std::polar(alpha, -v);
  }
  return s;
}

/// d/dd of steering_vector.
template <typename Scalar>
VectorC<Scalar> steering_derivative_distance(Scalar freq, const PolarT<Scalar>& p,
                                             const ArrayGeometry& g) {
  using std::cos;
  const Scalar amp = static_cast<Scalar>(kSpeedOfLight) /
                     (Scalar(4) * std::numbers::pi_v<Scalar> * freq * p.d * p.d);
  VectorC<Scalar> out(g.size());
  for (Index n = 0; n < g.size(); ++n) {
    const Scalar r = g.offset<Scalar>(n);
    const Scalar dn = element_distance(p, r);
    const std::complex<Scalar> phasor = std::polar(Scalar(1), -wave_phase(freq, dn));
    const std::complex<Scalar> factor(amp, (p.d - r * cos(p.theta)) / (Scalar(2) * p.d * dn));
    out(n) = -phasor * factor;
  }
  return out;
}

/// d/dtheta of steering_vector.
template <typename Scalar>
VectorC<Scalar> steering_derivative_angle(Scalar freq, const PolarT<Scalar>& p,
                                          const ArrayGeometry& g) {
  using std::sin;
  VectorC<Scalar> out(g.size());
  for (Index n = 0; n < g.size(); ++n) {
    const Scalar r = g.offset<Scalar>(n);
    const Scalar dn = element_distance(p, r);
    const std::complex<Scalar> phasor = std::polar(Scalar(1), -wave_phase(freq, dn));
    out(n) = -phasor * std::complex<Scalar>(0, r * sin(p.theta) / (Scalar(2) * dn));
  }
  return out;
}

/// Per-subcarrier steering matrices (N x K) and their d / theta derivatives.
struct SteeringSet {
  std::vector<MatrixXcd> S;
  std::vector<MatrixXcd> D;
  std::vector<MatrixXcd> B;

  Index subcarriers() const noexcept { return static_cast<Index>(S.size()); }
  Index antennas() const noexcept { return S.empty() ? 0 : S.front().rows(); }
  Index users() const noexcept { return S.empty() ? 0 : S.front().cols(); }
};

SteeringSet steering_set(const BandPlan& band, const std::vector<PolarPosition>& users,
                         const ArrayGeometry& g);

/// Throws unless users is non-empty, every position is valid and positions are distinct.
void validate_users(const std::vector<PolarPosition>& users);

struct NoiseModel {
  VectorXd variance;  // sigma_m^2 per subcarrier
};

/// sigma^2 = ||x||^2 / (N 10^(snr/10)); +inf dB gives a noiseless model.
double noise_variance_from_snr(double snr_db, const VectorXcd& noiseless, Index n_antennas);

/// Per-subcarrier noise from a noiseless reference snapshot with all symbols set to one.
NoiseModel noise_model_from_snr(double snr_db, const SteeringSet& steering);

struct AntennaSnapshot {
  std::vector<MatrixXcd> x;  // per subcarrier, N x L
  MatrixXcd symbols;         // K x L, shared across subcarriers

  Index samples() const noexcept { return symbols.cols(); }
};

/// Unit-modulus symbols with uniform random phase, one column per sample.
MatrixXcd draw_symbols(Index users, Index samples, std::mt19937_64& rng);

/// x_m(l) = S_m c(l) + z_m(l) with z ~ CN(0, sigma_m^2 I).
AntennaSnapshot synthesize_snapshots(const SteeringSet& steering, const NoiseModel& noise,
                                     Index samples, std::uint64_t seed);

}  // namespace nfloc
