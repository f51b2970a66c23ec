#include "nfloc/fisher.hpp"

#include "nfloc/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace nfloc {

FimPolar fim_polar(const SteeringSet& steering, const AnalogCombiner& combiner,
                   const BandPlan& band, const NoiseModel& noise, SymbolMode mode,
                   const VectorXcd& symbols, double snapshots) {
  const Index M = steering.subcarriers();
  const Index K = steering.users();
  if (band.size() != M || noise.variance.size() != M) {
    throw Error(Errc::DimensionMismatch, "steering, band and noise disagree on M");
  }
  if (mode == SymbolMode::Instantaneous && symbols.size() != K) {
    throw Error(Errc::DimensionMismatch, "symbol vector length differs from K");
  }
  const CombinerLayout& lay = combiner.layout();
  const double scale = 2.0 / static_cast<double>(lay.antennas_per_chain()) * snapshots;

  FimPolar out;
  out.mode = mode;
  out.F = MatrixXd::Zero(2 * K, 2 * K);
  MatrixXcd G(lay.rf_chains, 2 * K);
  for (Index m = 0; m < M; ++m) {
    if (!(noise.variance(m) > 0.0)) {
      throw Error(Errc::InvalidArgument, "Fisher information needs a positive noise variance");
    }
    G.leftCols(K) = apply_combiner(combiner, band.freqs(m), steering.D[m]);
    G.rightCols(K) = apply_combiner(combiner, band.freqs(m), steering.B[m]);
    if (mode == SymbolMode::Instantaneous) {
      G.leftCols(K) = G.leftCols(K) * symbols.asDiagonal();
      G.rightCols(K) = G.rightCols(K) * symbols.asDiagonal();
    }
    out.F += (scale / noise.variance(m)) * (G.adjoint() * G).real();
  }
  // Symmetrize away rounding in the Gram product.
  out.F = 0.5 * (out.F + out.F.transpose()).eval();
  return out;
}

MatrixXd jacobian_polar_to_cartesian(const std::vector<PolarPosition>& positions) {
  const Index K = static_cast<Index>(positions.size());
  MatrixXd J = MatrixXd::Zero(2 * K, 2 * K);
  for (Index k = 0; k < K; ++k) {
    const PolarPosition& p = positions[k];
    if (!(p.d > 0.0)) throw Error(Errc::DegenerateOrigin, "Jacobian undefined at d = 0");
    const double c = std::cos(p.theta), s = std::sin(p.theta);
    J(k, k) = c;                 // dd/dx
    J(K + k, k) = s;             // dd/dy
    J(k, K + k) = -s / p.d;      // dtheta/dx
    J(K + k, K + k) = c / p.d;   // dtheta/dy
  }
  return J;
}

MatrixXd jacobian_cartesian_from_polar(const std::vector<PolarPosition>& positions) {
  const Index K = static_cast<Index>(positions.size());
  MatrixXd Jp = MatrixXd::Zero(2 * K, 2 * K);
  for (Index k = 0; k < K; ++k) {
    const PolarPosition& p = positions[k];
    const double c = std::cos(p.theta), s = std::sin(p.theta);
    Jp(k, k) = c;                  // dx/dd
    Jp(k, K + k) = -p.d * s;       // dx/dtheta
    Jp(K + k, k) = s;              // dy/dd
    Jp(K + k, K + k) = p.d * c;    // dy/dtheta
  }
  return Jp;
}

CrbReport crb(const FimPolar& fim, const std::vector<PolarPosition>& positions) {
  const Index K = static_cast<Index>(positions.size());
  if (fim.F.rows() != 2 * K) throw Error(Errc::DimensionMismatch, "FIM size differs from 2K");
  const MatrixXd J = jacobian_polar_to_cartesian(positions);

  CrbReport out;
  out.fim_cartesian = J * fim.F * J.transpose();
  out.per_user = VectorXd::Constant(K, std::numeric_limits<double>::infinity());

  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(out.fim_cartesian);
  const VectorXd& lambda = eig.eigenvalues();
  const double lo = lambda.minCoeff(), hi = lambda.maxCoeff();
  if (!(lo > 0.0) || !(hi > 0.0)) return out;
  out.condition = hi / lo;
  if (out.condition > kSingularCondition) return out;

  const MatrixXd& V = eig.eigenvectors();
  const MatrixXd inverse = V * lambda.cwiseInverse().asDiagonal() * V.transpose();
  out.singular = false;
  out.crb = std::sqrt(inverse.trace());
  for (Index k = 0; k < K; ++k) out.per_user(k) = std::sqrt(inverse(k, k) + inverse(K + k, K + k));
  return out;
}

double crb_via_polar_covariance(const FimPolar& fim, const std::vector<PolarPosition>& positions) {
  const MatrixXd Jp = jacobian_cartesian_from_polar(positions);
  const MatrixXd cov = fim.F.ldlt().solve(Jp.transpose());
  return std::sqrt((Jp * cov).trace());
}

Heatmap crb_heatmap(const HeatmapArea& area, double resolution, const ArrayGeometry& geometry,
                    const BandPlan& band, const AnalogCombiner& combiner, double snr_db,
                    unsigned jobs) {
  if (!(resolution > 0.0)) throw Error(Errc::InvalidArgument, "resolution must be positive");
  if (!(area.x_max > area.x_min) || !(area.y_max > area.y_min)) {
    throw Error(Errc::InvalidArgument, "heatmap area is empty");
  }
  const Index nx = static_cast<Index>(std::llround((area.x_max - area.x_min) / resolution));
  const Index ny = static_cast<Index>(std::llround((area.y_max - area.y_min) / resolution));
  if (nx < 1 || ny < 1) throw Error(Errc::InvalidArgument, "resolution exceeds the area");

  Heatmap map;
  map.xs.resize(nx);
  map.ys.resize(ny);
  for (Index i = 0; i < nx; ++i) map.xs(i) = area.x_min + (static_cast<double>(i) + 0.5) * resolution;
  for (Index j = 0; j < ny; ++j) map.ys(j) = area.y_min + (static_cast<double>(j) + 0.5) * resolution;
  map.crb.resize(ny, nx);

  const double col = std::floor((0.0 - area.x_min) / resolution);
  const double row = std::floor((0.0 - area.y_min) / resolution);
  if (col >= 0 && col < nx && row >= 0 && row < ny) {
    map.array_col = static_cast<Index>(col);
    map.array_row = static_cast<Index>(row);
  }

  parallel_for(ny * nx, jobs, [&](Index cell) {
    const Index j = cell / nx, i = cell % nx;
    const double x = map.xs(i), y = map.ys(j);
    const double theta = std::atan2(y, x);
    if (!(theta > 0.0 && theta < kPi)) {
      map.crb(j, i) = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    const std::vector<PolarPosition> user{{std::hypot(x, y), theta}};
    const SteeringSet steering = steering_set(band, user, geometry);
    const NoiseModel noise = noise_model_from_snr(snr_db, steering);
    map.crb(j, i) = crb(fim_polar(steering, combiner, band, noise), user).crb;
  });
  return map;
}

}  // namespace nfloc
