#pragma once

// Fisher information and Cramer-Rao bounds for user positions.
//
// Parameters are ordered eta = [d_1..d_K, theta_1..theta_K] and Cartesian
// positions p = [x_1..x_K, y_1..y_K]. The combined noise Q_m z_m has
// covariance sigma_m^2 N_t N_s I, so
//   F_ab = 2 / (N_t N_s) sum_m 1/sigma_m^2 Re{C^H X_m^H Q_m^H Q_m Y_m C}
// with X, Y in {D, B}.

#include "nfloc/channel.hpp"
#include "nfloc/geometry.hpp"
#include "nfloc/hybrid_array.hpp"

#include <limits>
#include <vector>

namespace nfloc {

enum class SymbolMode {
  Instantaneous,  // use the supplied symbol vector c
  Averaged,       // C replaced by the identity
};

struct FimPolar {
  MatrixXd F;  // 2K x 2K
  SymbolMode mode = SymbolMode::Averaged;

  Index users() const noexcept { return F.rows() / 2; }
  auto dd() const { return F.topLeftCorner(users(), users()); }
  auto dtheta() const { return F.topRightCorner(users(), users()); }
  auto thetad() const { return F.bottomLeftCorner(users(), users()); }
  auto thetatheta() const { return F.bottomRightCorner(users(), users()); }
};

/// Polar-parameter FIM. `symbols` is used in Instantaneous mode (length K);
/// `snapshots` multiplies the single-snapshot information.
FimPolar fim_polar(const SteeringSet& steering, const AnalogCombiner& combiner,
                   const BandPlan& band, const NoiseModel& noise,
                   SymbolMode mode = SymbolMode::Averaged, const VectorXcd& symbols = {},
                   double snapshots = 1.0);

/// Chain-rule matrix with J(p_i, eta_j) = d eta_j / d p_i, so F_E = J F J^T.
MatrixXd jacobian_polar_to_cartesian(const std::vector<PolarPosition>& positions);

/// d p_i / d eta_j, equal to J^{-T}; maps polar covariances to Cartesian ones.
MatrixXd jacobian_cartesian_from_polar(const std::vector<PolarPosition>& positions);

struct CrbReport {
  MatrixXd fim_cartesian;  // F_E
  double crb = std::numeric_limits<double>::infinity();  // m
  VectorXd per_user;                                     // m
  double condition = std::numeric_limits<double>::infinity();
  bool singular = true;
};

inline constexpr double kSingularCondition = 1e12;

/// crb = sqrt(tr(F_E^{-1})); flagged singular (crb = inf) when cond(F_E) > 1e12.
CrbReport crb(const FimPolar& fim, const std::vector<PolarPosition>& positions);

/// sqrt(tr(J_p F^{-1} J_p^T)) through the polar covariance; agrees with crb().
double crb_via_polar_covariance(const FimPolar& fim, const std::vector<PolarPosition>& positions);

struct HeatmapArea {
  double x_min = -10.0;
  double x_max = 10.0;
  double y_min = 0.0;
  double y_max = 20.0;
};

struct Heatmap {
  VectorXd xs;  // cell centres
  VectorXd ys;
  MatrixXd crb;  // ys.size() x xs.size(); NaN marks cells behind the array
  Index array_row = -1;  // cell containing the array reference point, if inside
  Index array_col = -1;

  Index cells() const noexcept { return crb.size(); }
};

/// Single-user CRB at every cell centre for a fixed combiner. The noise level
/// of each cell is set from that cell's own noiseless signal at `snr_db`.
Heatmap crb_heatmap(const HeatmapArea& area, double resolution, const ArrayGeometry& geometry,
                    const BandPlan& band, const AnalogCombiner& combiner, double snr_db,
                    unsigned jobs = 1);

}  // namespace nfloc
