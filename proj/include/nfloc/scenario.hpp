#pragma once

// Physical scenario: array, hybrid layout, band, users and noise level.

#include "nfloc/channel.hpp"
#include "nfloc/geometry.hpp"
#include "nfloc/hybrid_array.hpp"

#include <vector>

namespace nfloc {

struct Scenario {
  double carrier = 300e9;    // f_c, Hz
  double bandwidth = 30e9;   // B, Hz
  Index subcarriers = 12;    // M
  Index snapshots = 256;     // L
  Index antennas = 256;      // N
  Index rf_chains = 8;       // N_d
  Index ttds_per_chain = 16; // N_t
  double spacing = 5e-4;     // Delta, m
  double t_max = 5e-9;       // s
  Index delay_grid_points = 64;
  double snr_db = -5.0;
  std::vector<PolarPosition> users{{8.0, kPi / 3.0}, {8.0, kPi / 4.0}};

  /// Throws ValidationError naming the first violated invariant.
  void validate() const;

  ArrayGeometry geometry() const { return ArrayGeometry(antennas, spacing); }
  CombinerLayout layout() const { return layout_for(antennas, rf_chains, ttds_per_chain); }
  BandPlan band() const { return subcarrier_frequencies(carrier, bandwidth, subcarriers); }
  SteeringSet steering() const { return steering_set(band(), users, geometry()); }
  NoiseModel noise() const { return noise_model_from_snr(snr_db, steering()); }
};

}  // namespace nfloc
