#pragma once

// TTD-based hybrid analog combiner.
//
// N antennas feed N_d RF chains. Chain i owns N_t true-time delayers, and
// delayer (i, l) owns N_s consecutive antennas, each behind its own phase
// shifter. Blocks are numbered b = i * N_t + l, and block b covers antennas
// [b * N_s, (b + 1) * N_s). The per-subcarrier combiner is Q_m = T_m A with
// T_m holding exp(+j 2 pi f_m t_{i,l}) and A holding exp(j phi_n).

#include "nfloc/channel.hpp"
#include "nfloc/types.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace nfloc {

struct CombinerLayout {
  Index rf_chains = 1;       // N_d
  Index ttds_per_chain = 1;  // N_t
  Index ps_per_ttd = 1;      // N_s

  Index antennas() const noexcept { return rf_chains * ttds_per_chain * ps_per_ttd; }
  Index blocks() const noexcept { return rf_chains * ttds_per_chain; }
  Index antennas_per_chain() const noexcept { return ttds_per_chain * ps_per_ttd; }
  Index block_of(Index n) const noexcept { return n / ps_per_ttd; }
  Index chain_of_block(Index b) const noexcept { return b / ttds_per_chain; }
  Index chain_of(Index n) const noexcept { return n / antennas_per_chain(); }
};

/// Layout with N_s chosen so that N = N_d * N_t * N_s; throws InvalidLayout otherwise.
CombinerLayout layout_for(Index antennas, Index rf_chains, Index ttds_per_chain);

/// Delay search set {0, t_max/Q, ..., t_max}.
VectorXd delay_grid(double t_max, Index grid_points);

class AnalogCombiner {
 public:
  /// Phases are wrapped to [0, 2 pi); delays must lie in [0, t_max].
  AnalogCombiner(CombinerLayout layout, VectorXd phases, MatrixXd delays, double t_max);

  const CombinerLayout& layout() const noexcept { return layout_; }
  const VectorXd& phases() const noexcept { return phases_; }
  const MatrixXd& delays() const noexcept { return delays_; }  // N_d x N_t
  double t_max() const noexcept { return t_max_; }

  /// exp(j phi_n) for every antenna.
  VectorXcd phase_coefficients() const;
  /// Delay of block b.
  double block_delay(Index b) const {
    return delays_(layout_.chain_of_block(b), b % layout_.ttds_per_chain);
  }
  /// M x blocks matrix of exp(+j 2 pi f_m t_b).
  MatrixXcd ttd_phasors(const BandPlan& band) const;

  void set_phases(const VectorXd& phases);
  void set_delays(const MatrixXd& delays);

 private:
  CombinerLayout layout_;
  VectorXd phases_;
  MatrixXd delays_;
  double t_max_;
};

/// Uniform phases on [0, 2 pi) and delays drawn uniformly from delay_grid(t_max, grid_points).
AnalogCombiner random_combiner(const CombinerLayout& layout, double t_max, Index grid_points,
                               std::mt19937_64& rng);

/// Dense A, N_d N_t x N.
MatrixXcd build_phase_matrix(const AnalogCombiner& c);
/// Dense T_m, N_d x N_d N_t.
MatrixXcd build_delay_matrix(const AnalogCombiner& c, double freq);
/// Dense Q_m = T_m A, N_d x N.
MatrixXcd combiner_matrix(const AnalogCombiner& c, double freq);

/// Structured Q_m X for an N x L block of antenna signals.
MatrixXcd apply_combiner(const AnalogCombiner& c, double freq, const MatrixXcd& x);

struct ObservationBatch {
  std::vector<MatrixXcd> y;  // per subcarrier, N_d x L
  std::vector<MatrixXcd> R;  // per subcarrier sample covariance, N_d x N_d
  Index samples = 0;

  Index subcarriers() const noexcept { return static_cast<Index>(R.size()); }
};

/// Sample covariance (1/L) sum_l y(l) y(l)^H.
MatrixXcd sample_covariance(const MatrixXcd& y);

/// y_m(l) = Q_m x_m(l) and the per-subcarrier sample covariances.
ObservationBatch combine(const AnalogCombiner& c, const BandPlan& band, const AntennaSnapshot& x);

/// Draws combined observations directly: y_m = Q_m S_m c + w with
/// w ~ CN(0, sigma_m^2 N_t N_s I), the distribution of Q_m z_m.
ObservationBatch synthesize_observations(const SteeringSet& steering, const NoiseModel& noise,
                                         const AnalogCombiner& c, const BandPlan& band,
                                         Index samples, std::mt19937_64& rng);

}  // namespace nfloc
