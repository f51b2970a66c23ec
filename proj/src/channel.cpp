#include "nfloc/channel.hpp"

#include <limits>

namespace nfloc {

BandPlan subcarrier_frequencies(double carrier, double bandwidth, Index n_subcarriers) {
  if (n_subcarriers < 1) throw Error(Errc::InvalidBand, "need at least one subcarrier");
  if (!(bandwidth >= 0.0)) throw Error(Errc::InvalidBand, "bandwidth must be non-negative");
  if (!(carrier > bandwidth / 2.0)) throw Error(Errc::InvalidBand, "carrier must exceed B/2");
  if (n_subcarriers > 1 && bandwidth == 0.0) {
    throw Error(Errc::InvalidBand, "several subcarriers need a positive bandwidth");
  }

  BandPlan band;
  band.carrier = carrier;
  band.bandwidth = bandwidth;
  band.freqs.resize(n_subcarriers);
  if (n_subcarriers == 1) {
    band.freqs(0) = carrier;
    return band;
  }
  const double lo = carrier - bandwidth / 2.0;
  const double step = bandwidth / static_cast<double>(n_subcarriers - 1);
  for (Index m = 0; m < n_subcarriers; ++m) band.freqs(m) = lo + static_cast<double>(m) * step;
  band.freqs(n_subcarriers - 1) = carrier + bandwidth / 2.0;
  return band;
}

void validate_users(const std::vector<PolarPosition>& users) {
  if (users.empty()) throw Error(Errc::InvalidArgument, "at least one user is required");
  for (std::size_t k = 0; k < users.size(); ++k) {
    if (!is_valid(users[k])) {
      throw Error(Errc::AngleOutOfRange, "user " + std::to_string(k) + " has an invalid position");
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (users[j] == users[k]) {
        throw Error(Errc::InvalidArgument, "user positions must be distinct");
      }
    }
  }
}

SteeringSet steering_set(const BandPlan& band, const std::vector<PolarPosition>& users,
                         const ArrayGeometry& g) {
  validate_users(users);
  const Index M = band.size();
  const Index K = static_cast<Index>(users.size());
  SteeringSet out;
  out.S.assign(M, MatrixXcd(g.size(), K));
  out.D.assign(M, MatrixXcd(g.size(), K));
  out.B.assign(M, MatrixXcd(g.size(), K));
  for (Index m = 0; m < M; ++m) {
    const double f = band.freqs(m);
    for (Index k = 0; k < K; ++k) {
      out.S[m].col(k) = steering_vector(f, users[k], g);
      out.D[m].col(k) = steering_derivative_distance(f, users[k], g);
      out.B[m].col(k) = steering_derivative_angle(f, users[k], g);
    }
  }
  return out;
}

double noise_variance_from_snr(double snr_db, const VectorXcd& noiseless, Index n_antennas) {
  const double power = noiseless.squaredNorm();
  if (!(power > 0.0)) throw Error(Errc::ZeroSignal, "reference signal has zero power");
  if (n_antennas < 1) throw Error(Errc::InvalidArgument, "antenna count must be positive");
  if (snr_db == std::numeric_limits<double>::infinity()) return 0.0;
  return power / (static_cast<double>(n_antennas) * std::pow(10.0, snr_db / 10.0));
}

NoiseModel noise_model_from_snr(double snr_db, const SteeringSet& steering) {
  NoiseModel noise;
  noise.variance.resize(steering.subcarriers());
  for (Index m = 0; m < steering.subcarriers(); ++m) {
    const VectorXcd reference = steering.S[m].rowwise().sum();
    noise.variance(m) = noise_variance_from_snr(snr_db, reference, steering.antennas());
  }
  return noise;
}

MatrixXcd draw_symbols(Index users, Index samples, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  MatrixXcd c(users, samples);
  for (Index l = 0; l < samples; ++l) {
    for (Index k = 0; k < users; ++k) c(k, l) = std::polar(1.0, phase(rng));
  }
  return c;
}

AntennaSnapshot synthesize_snapshots(const SteeringSet& steering, const NoiseModel& noise,
                                     Index samples, std::uint64_t seed) {
  if (samples < 1) throw Error(Errc::InvalidArgument, "need at least one snapshot");
  if (noise.variance.size() != steering.subcarriers()) {
    throw Error(Errc::DimensionMismatch, "noise model and steering set disagree on M");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  AntennaSnapshot out;
  out.symbols = draw_symbols(steering.users(), samples, rng);
  const Index N = steering.antennas();
  out.x.resize(steering.subcarriers());
  for (Index m = 0; m < steering.subcarriers(); ++m) {
    out.x[m] = steering.S[m] * out.symbols;
    const double scale = std::sqrt(noise.variance(m) / 2.0);
    if (scale == 0.0) continue;
    for (Index l = 0; l < samples; ++l) {
      for (Index n = 0; n < N; ++n) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        out.x[m](n, l) += std::complex<double>(scale * re, scale * im);
      }
    }
  }
  return out;
}

}  // namespace nfloc
