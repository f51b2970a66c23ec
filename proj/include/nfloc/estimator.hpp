#pragma once

// Maximum-likelihood localization from combined observations.
//
// The log-likelihood is proportional to sum_m tr(P[Q_m S_m(eta)] R_m). It is
// maximized by alternating projection: each user's position is found by a
// two-dimensional search while the others' steering columns are projected out.

#include "nfloc/channel.hpp"
#include "nfloc/geometry.hpp"
#include "nfloc/hybrid_array.hpp"

#include <optional>
#include <vector>

namespace nfloc {

struct Projection {
  MatrixXcd matrix;
  Index rank = 0;
  bool rank_deficient = false;
};

/// Orthogonal projector onto the numerical column space of X. Singular values
/// below tol * sigma_max are treated as zero and flag rank deficiency.
Projection projector(const MatrixXcd& X, double tol = 1e-10);

/// Fast evaluation of Q_m s_m(eta) for every subcarrier of a fixed combiner.
///
/// Exploits the uniform subcarrier grid: exp(-j 2 pi f_m d / c) is built by a
/// phasor recurrence over m, so each antenna costs one sqrt and two sincos.
/// evaluate() reuses an internal scratch buffer: one instance per thread.
class CombinedSteering {
 public:
  CombinedSteering(const ArrayGeometry& geometry, const BandPlan& band,
                   const AnalogCombiner& combiner);

  Index rf_chains() const noexcept { return rf_chains_; }
  Index subcarriers() const noexcept { return subcarriers_; }
  double aperture() const noexcept { return offsets_.size() ? offsets_(offsets_.size() - 1) : 0.0; }

  /// Writes Q_m s_m(p) into column m of out (N_d x M).
  void evaluate(const PolarPosition& p, MatrixXcd& out) const;
  MatrixXcd evaluate(const PolarPosition& p) const;

 private:
  Index antennas_;
  Index rf_chains_;
  Index subcarriers_;
  Index blocks_;
  Index ps_per_ttd_;
  Index ttds_per_chain_;
  double base_wavenumber_;  // 2 pi f_1 / c
  double step_wavenumber_;  // 2 pi df / c
  VectorXd freqs_;
  VectorXd offsets_;
  std::vector<double> a_re_, a_im_;
  MatrixXcd ttd_;  // M x blocks
  mutable std::vector<double> sum_re_, sum_im_;
};

/// Per-subcarrier projectors P_m onto the already-placed users' columns.
using ProjectorSet = std::vector<MatrixXcd>;

/// Projectors onto span{Q_m s_m(p) : p in positions}, one per subcarrier.
ProjectorSet steering_projectors(const CombinedSteering& model,
                                 const std::vector<PolarPosition>& positions,
                                 double tol = 1e-10);

/// (I - P_m) Q_m s_m(eta_k) as an N_d x M matrix. An empty set means P = 0.
MatrixXcd residual_steering(const PolarPosition& p, const ProjectorSet& previous,
                            const CombinedSteering& model);

/// sum_m tr(P[sbar_m] R_m); subcarriers with a vanishing residual contribute 0.
double single_user_objective(const PolarPosition& p, const ProjectorSet& previous,
                             const CombinedSteering& model, const ObservationBatch& batch);

/// sum_m tr(P[Q_m S_m(eta)] R_m).
double full_likelihood(const std::vector<PolarPosition>& positions,
                       const CombinedSteering& model, const ObservationBatch& batch);

/// Coarse-to-fine search box.
///
/// The coarse grid is uniform in 1/d and cos(theta) measured from the array
/// centre, the coordinates in which the wavefront curvature and the linear
/// phase ramp vary uniformly and independently. The `starts` best local maxima
/// of the coarse scan are refined separately and the best result kept. Each
/// refinement level re-centres a refine_d x refine_theta grid on the incumbent
/// with a half-width of refine_span previous-level cells. A Nelder-Mead polish
/// in the same coordinates then follows ridges the axis-aligned boxes cannot;
/// it stops once the simplex is smaller than polish_tol final-level cells.
struct SearchGrid {
  double d_min = 1.0;
  double d_max = 20.0;
  double theta_min = 0.1 * kPi;
  double theta_max = 0.9 * kPi;
  Index coarse_d = 24;
  Index coarse_theta = 256;
  Index refine_d = 11;
  Index refine_theta = 11;
  Index levels = 3;
  Index starts = 3;  // coarse local maxima refined independently
  double refine_span = 2.0;
  double polish_tol = 1e-4;
  Index polish_evaluations = 400;

  void validate() const;
};

struct SearchResult {
  PolarPosition position{};
  double value = 0.0;
  double step_inverse_distance = 0.0;  // final resolution in 1/d
  double step_cosine = 0.0;            // final resolution in cos(theta)
  Index evaluations = 0;

  /// Half-diagonal of the final resolution cell around `position`, in metres.
  double cell_radius() const;
};

/// Deterministic coarse-to-fine maximizer of single_user_objective. Ties keep
/// the earliest point in (d ascending, theta ascending) order; an incumbent is
/// kept unless the grid finds a strictly larger objective.
SearchResult maximize_single_user(const ProjectorSet& previous, const CombinedSteering& model,
                                  const ObservationBatch& batch, const SearchGrid& grid,
                                  std::optional<PolarPosition> incumbent = std::nullopt);

struct EstimationResult {
  std::vector<PolarPosition> positions;
  std::vector<std::vector<PolarPosition>> trajectory;  // initial estimate, then one entry per sweep
  std::vector<double> objective;                       // full likelihood at each trajectory entry
};

/// Alternating-projection localization: users are added one at a time, then
/// `sweeps` refinement passes re-maximize each user against the others.
EstimationResult ap_localize(const ObservationBatch& batch, const CombinedSteering& model,
                             Index users, const SearchGrid& grid, Index sweeps);

/// Refinement passes only, starting from `initial`.
EstimationResult ap_refine(const ObservationBatch& batch, const CombinedSteering& model,
                           std::vector<PolarPosition> initial, const SearchGrid& grid,
                           Index sweeps);

}  // namespace nfloc
