#include "nfloc/hybrid_array.hpp"

#include <cmath>

namespace nfloc {

CombinerLayout layout_for(Index antennas, Index rf_chains, Index ttds_per_chain) {
  if (antennas < 1 || rf_chains < 1 || ttds_per_chain < 1) {
    throw Error(Errc::InvalidLayout, "layout counts must be positive");
  }
  if (antennas % (rf_chains * ttds_per_chain) != 0) {
    throw Error(Errc::InvalidLayout, "N must be divisible by N_d * N_t");
  }
  return {rf_chains, ttds_per_chain, antennas / (rf_chains * ttds_per_chain)};
}

VectorXd delay_grid(double t_max, Index grid_points) {
  if (grid_points < 1) throw Error(Errc::InvalidArgument, "delay grid needs Q >= 1");
  VectorXd grid(grid_points + 1);
  for (Index q = 0; q <= grid_points; ++q) {
    grid(q) = t_max * static_cast<double>(q) / static_cast<double>(grid_points);
  }
  grid(grid_points) = t_max;
  return grid;
}

AnalogCombiner::AnalogCombiner(CombinerLayout layout, VectorXd phases, MatrixXd delays,
                               double t_max)
    : layout_(layout), t_max_(t_max) {
  if (layout.rf_chains < 1 || layout.ttds_per_chain < 1 || layout.ps_per_ttd < 1) {
    throw Error(Errc::LayoutMismatch, "layout counts must be positive");
  }
  if (!(t_max >= 0.0)) throw Error(Errc::InvalidArgument, "t_max must be non-negative");
  set_phases(phases);
  set_delays(delays);
}

void AnalogCombiner::set_phases(const VectorXd& phases) {
  if (phases.size() != layout_.antennas()) {
    throw Error(Errc::LayoutMismatch, "phase bank size differs from N");
  }
  phases_ = phases;
  for (Index n = 0; n < phases_.size(); ++n) {
    double p = std::fmod(phases_(n), kTwoPi);
    if (p < 0.0) p += kTwoPi;
    if (p >= kTwoPi) p = 0.0;
    phases_(n) = p;
  }
}

void AnalogCombiner::set_delays(const MatrixXd& delays) {
  if (delays.rows() != layout_.rf_chains || delays.cols() != layout_.ttds_per_chain) {
    throw Error(Errc::LayoutMismatch, "delay bank must be N_d x N_t");
  }
  if (delays.size() > 0 && (delays.minCoeff() < 0.0 || delays.maxCoeff() > t_max_)) {
    throw Error(Errc::InvalidArgument, "delays must lie in [0, t_max]");
  }
  delays_ = delays;
}

VectorXcd AnalogCombiner::phase_coefficients() const {
  VectorXcd a(phases_.size());
  for (Index n = 0; n < phases_.size(); ++n) a(n) = std::polar(1.0, phases_(n));
  return a;
}

MatrixXcd AnalogCombiner::ttd_phasors(const BandPlan& band) const {
  MatrixXcd tau(band.size(), layout_.blocks());
  for (Index m = 0; m < band.size(); ++m) {
    for (Index b = 0; b < layout_.blocks(); ++b) {
      tau(m, b) = std::polar(1.0, kTwoPi * band.freqs(m) * block_delay(b));
    }
  }
  return tau;
}

AnalogCombiner random_combiner(const CombinerLayout& layout, double t_max, Index grid_points,
                               std::mt19937_64& rng) {
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  VectorXd phases(layout.antennas());
  for (Index n = 0; n < phases.size(); ++n) phases(n) = phase(rng);

  const VectorXd grid = delay_grid(t_max, grid_points);
  std::uniform_int_distribution<Index> pick(0, grid.size() - 1);
  MatrixXd delays(layout.rf_chains, layout.ttds_per_chain);
  for (Index i = 0; i < delays.rows(); ++i) {
    for (Index l = 0; l < delays.cols(); ++l) delays(i, l) = grid(pick(rng));
  }
  return AnalogCombiner(layout, std::move(phases), std::move(delays), t_max);
}

MatrixXcd build_phase_matrix(const AnalogCombiner& c) {
  const CombinerLayout& lay = c.layout();
  MatrixXcd A = MatrixXcd::Zero(lay.blocks(), lay.antennas());
  const VectorXcd a = c.phase_coefficients();
  for (Index n = 0; n < lay.antennas(); ++n) A(lay.block_of(n), n) = a(n);
  return A;
}

MatrixXcd build_delay_matrix(const AnalogCombiner& c, double freq) {
  const CombinerLayout& lay = c.layout();
  MatrixXcd T = MatrixXcd::Zero(lay.rf_chains, lay.blocks());
  for (Index b = 0; b < lay.blocks(); ++b) {
    T(lay.chain_of_block(b), b) = std::polar(1.0, kTwoPi * freq * c.block_delay(b));
  }
  return T;
}

MatrixXcd combiner_matrix(const AnalogCombiner& c, double freq) {
  return build_delay_matrix(c, freq) * build_phase_matrix(c);
}

MatrixXcd apply_combiner(const AnalogCombiner& c, double freq, const MatrixXcd& x) {
  const CombinerLayout& lay = c.layout();
  if (x.rows() != lay.antennas()) {
    throw Error(Errc::DimensionMismatch, "snapshot length differs from N");
  }
  const VectorXcd a = c.phase_coefficients();
  MatrixXcd y = MatrixXcd::Zero(lay.rf_chains, x.cols());
  for (Index b = 0; b < lay.blocks(); ++b) {
    const std::complex<double> tau = std::polar(1.0, kTwoPi * freq * c.block_delay(b));
    const Index first = b * lay.ps_per_ttd;
    const auto block_sum = (a.segment(first, lay.ps_per_ttd).asDiagonal() *
                            x.middleRows(first, lay.ps_per_ttd))
                               .colwise()
                               .sum();
    y.row(lay.chain_of_block(b)) += tau * block_sum;
  }
  return y;
}

MatrixXcd sample_covariance(const MatrixXcd& y) {
  return (y * y.adjoint()) / static_cast<double>(y.cols());
}

ObservationBatch combine(const AnalogCombiner& c, const BandPlan& band,
                         const AntennaSnapshot& x) {
  if (static_cast<Index>(x.x.size()) != band.size()) {
    throw Error(Errc::DimensionMismatch, "snapshot and band plan disagree on M");
  }
  ObservationBatch out;
  out.samples = x.samples();
  out.y.reserve(x.x.size());
  out.R.reserve(x.x.size());
  for (Index m = 0; m < band.size(); ++m) {
    out.y.push_back(apply_combiner(c, band.freqs(m), x.x[m]));
    out.R.push_back(sample_covariance(out.y.back()));
  }
  return out;
}

ObservationBatch synthesize_observations(const SteeringSet& steering, const NoiseModel& noise,
                                         const AnalogCombiner& c, const BandPlan& band,
                                         Index samples, std::mt19937_64& rng) {
  if (samples < 1) throw Error(Errc::InvalidArgument, "need at least one snapshot");
  if (steering.subcarriers() != band.size() || noise.variance.size() != band.size()) {
    throw Error(Errc::DimensionMismatch, "steering, noise and band disagree on M");
  }
  const CombinerLayout& lay = c.layout();
  const MatrixXcd symbols = draw_symbols(steering.users(), samples, rng);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double gain = static_cast<double>(lay.antennas_per_chain());

  ObservationBatch out;
  out.samples = samples;
  for (Index m = 0; m < band.size(); ++m) {
    const MatrixXcd QS = apply_combiner(c, band.freqs(m), steering.S[m]);
    MatrixXcd y = QS * symbols;
    const double scale = std::sqrt(noise.variance(m) * gain / 2.0);
    if (scale > 0.0) {
      for (Index l = 0; l < samples; ++l) {
        for (Index i = 0; i < lay.rf_chains; ++i) {
          const double re = gauss(rng);
          const double im = gauss(rng);
          y(i, l) += std::complex<double>(scale * re, scale * im);
        }
      }
    }
    out.R.push_back(sample_covariance(y));
    out.y.push_back(std::move(y));
  }
  return out;
}

}  // namespace nfloc
