#pragma once

// Alternating localization and beamfocusing without prior position knowledge.
//
// The initial estimate comes from the successive single-user placement of the
// AP estimator under a random combiner. Each of the K_t iterations then runs
// one AP sweep with the current combiner and observations, redesigns the
// combiner at the new estimates and draws fresh pilots through it.

#include "nfloc/analog_design.hpp"
#include "nfloc/estimator.hpp"
#include "nfloc/scenario.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace nfloc {

struct JointConfig {
  Index iterations = 10;  // K_t
  SearchGrid grid;
  DesignOptions design;
  DesignForm form = DesignForm::Surrogate;
  bool keep_combiners = false;
};

struct JointResult {
  std::vector<PolarPosition> positions;
  std::vector<std::vector<PolarPosition>> trajectory;  // initial estimate, then one per iteration
  std::vector<double> objective;     // AP likelihood of each trajectory entry on its own batch
  std::vector<double> design_value;  // design objective after each redesign
  std::vector<AnalogCombiner> combiners;  // combiner behind each trajectory entry, if kept
};

/// Runs the loop from `initial`, drawing every pilot batch from `pilots`.
JointResult joint_localize(const Scenario& scenario, const JointConfig& cfg,
                           AnalogCombiner initial, std::mt19937_64& pilots);

/// Random initial combiner from `start`, then joint_localize.
JointResult joint_localize(const Scenario& scenario, const JointConfig& cfg,
                           std::mt19937_64& start, std::mt19937_64& pilots);

/// Initial combiner designed (from a random start) at the true positions
/// perturbed by N(0, prior_std^2) in x and y, then the same loop.
JointResult warm_start_with_prior(const Scenario& scenario, double prior_std,
                                  const JointConfig& cfg, std::mt19937_64& start,
                                  std::mt19937_64& prior, std::mt19937_64& pilots);

/// Design objective at `targets` with the scenario's noise weights. Exact
/// duplicates among the targets are designed for once.
DesignObjective design_objective_for(const Scenario& scenario,
                                     const std::vector<PolarPosition>& targets, DesignForm form);

/// CSV columns: iteration, user, d_est, theta_est, x_est, y_est.
void write_trajectory_csv(std::ostream& out, const JointResult& result);

}  // namespace nfloc
