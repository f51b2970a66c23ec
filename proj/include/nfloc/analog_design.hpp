#pragma once

// Analog combiner design: maximize
//   g = sum_m w_m sum_k || T_m A u_{m,k} ||^2
// over unit-modulus phases (Riemannian conjugate gradient on the product of
// N circles) and grid-searched TTD delays, alternating between the two.

#include "nfloc/channel.hpp"
#include "nfloc/geometry.hpp"
#include "nfloc/hybrid_array.hpp"

#include <optional>
#include <random>
#include <vector>

namespace nfloc {

enum class DesignForm {
  Surrogate,   // U_m = D_m + B_m
  ExactTrace,  // U_m = [D_m, B_m], i.e. the trace of the averaged FIM
};

struct DesignObjective {
  VectorXd freqs;             // Hz
  std::vector<MatrixXcd> U;   // per subcarrier, N x columns
  VectorXd weights;           // w_m

  Index subcarriers() const noexcept { return freqs.size(); }
  Index columns() const noexcept { return U.empty() ? 0 : U.front().cols(); }
};

/// Objective at the given steering derivatives. Weights are 1/sigma_m^2 when a
/// noise model with positive variances is given, otherwise 1.
DesignObjective make_design_objective(const BandPlan& band, const SteeringSet& steering,
                                      const std::optional<NoiseModel>& noise = std::nullopt,
                                      DesignForm form = DesignForm::Surrogate);

/// Convenience: objective for target positions with noise set from `snr_db`.
DesignObjective design_objective_at(const ArrayGeometry& geometry, const BandPlan& band,
                                    const std::vector<PolarPosition>& targets, double snr_db,
                                    DesignForm form = DesignForm::Surrogate);

double design_objective_value(const AnalogCombiner& combiner, const DesignObjective& obj);

/// g as a function of the phase vector with the delays held fixed.
class PhaseProblem {
 public:
  PhaseProblem(const AnalogCombiner& combiner, const DesignObjective& obj);

  Index size() const noexcept { return layout_.antennas(); }
  double value(const VectorXcd& a) const;
  /// Euclidean gradient 2 sum_{m,k} w_m W~^H W~ a.
  VectorXcd gradient(const VectorXcd& a) const;
  /// Dense pruned operator stack [sqrt(w_m) W~_{m,k}] (rows M K N_d, cols N).
  MatrixXcd pruned_operator() const;

 private:
  void chain_outputs(const VectorXcd& a, Index m, Index k, VectorXcd& y) const;

  CombinerLayout layout_;
  DesignObjective obj_;
  MatrixXcd tau_;  // M x blocks
};

/// Tangent-space projection of a Euclidean gradient at a: v - Re(v o a*) o a.
VectorXcd project_tangent(const VectorXcd& v, const VectorXcd& a);
/// Entrywise normalization to unit modulus; zero entries fall back to `fallback`.
VectorXcd retract(const VectorXcd& v, const VectorXcd& fallback);

struct RcgState {
  VectorXcd a;          // unit modulus
  VectorXcd gradient;   // Riemannian gradient at a
  VectorXcd direction;  // ascent direction
  double value = 0.0;
  double step = 0.0;    // last accepted Armijo step
  double zeta = 0.0;    // last Polak-Ribiere coefficient
  Index iteration = 0;
  bool stalled = false;
};

struct ArmijoOptions {
  double initial_step = 1.0;
  double backtrack = 0.5;
  double sufficient_increase = 1e-4;
  Index max_backtracks = 30;
};

RcgState rcg_start(const PhaseProblem& problem, const VectorXcd& a);

/// One RCG ascent step. A failed line search returns the input with `stalled` set.
RcgState riemannian_step(const RcgState& state, const PhaseProblem& problem,
                         const ArmijoOptions& armijo = {});

struct PhaseOptions {
  Index max_iters = 300;
  double tol = 1e-9;
  ArmijoOptions armijo;
};

struct PhaseResult {
  VectorXd phases;
  double value = 0.0;
  Index iterations = 0;
  bool stalled = false;
  std::vector<double> history;  // objective after each step, starting with the input
};

PhaseResult optimize_phases(const AnalogCombiner& combiner, const DesignObjective& obj,
                            const PhaseOptions& options = {});

struct DelaySearchConfig {
  Index grid_points = 64;  // |S| = grid_points + 1
  Index max_sweeps = 20;
};

struct DelayResult {
  MatrixXd delays;  // N_d x N_t
  double value = 0.0;
  Index sweeps = 0;
  std::vector<double> history;  // objective after each coordinate update, starting with the input
};

DelayResult optimize_delays(const AnalogCombiner& combiner, const DesignObjective& obj,
                            const DelaySearchConfig& cfg = {});

struct DesignOptions {
  Index outer_iters = 20;
  double tol = 1e-7;
  PhaseOptions phases;
  DelaySearchConfig delays;
};

struct DesignResult {
  AnalogCombiner combiner;
  double value = 0.0;
  Index outer_iterations = 0;
  std::vector<double> history;  // objective after each outer iteration, starting with the input
};

/// Alternates optimize_phases and optimize_delays from `start`. With t_max = 0
/// only the phases are optimized.
DesignResult alternate_design(const AnalogCombiner& start, const DesignObjective& obj,
                              const DesignOptions& options = {});

/// Same phases, with every delay copied onto the finer bank of `ttds_per_chain`
/// delayers per chain (a multiple of the current count). The combiner is unchanged.
AnalogCombiner lift_delays(const AnalogCombiner& combiner, Index ttds_per_chain);

}  // namespace nfloc
