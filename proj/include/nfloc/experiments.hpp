#pragma once

// Monte Carlo harness: schemes, trial seeding, RMSE statistics and the sweeps
// behind each CSV output.
//
// Trial seeds depend on (master seed, experiment tag, sweep index, trial
// index) and not on the scheme, so all schemes at a sweep point see the same
// symbols, noise and random starting combiner.

#include "nfloc/analog_design.hpp"
#include "nfloc/estimator.hpp"
#include "nfloc/fisher.hpp"
#include "nfloc/joint.hpp"
#include "nfloc/scenario.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace nfloc {

enum class SchemeKind {
  Random,            // random combiner, Algorithm 1
  PsOnly,            // design at the true positions with t_max = 0
  Optimal,           // design at the true positions
  Alternating,       // joint localization from a random combiner
  AlternatingPrior,  // joint localization from a design at a noisy prior (parameter = std, m)
  SingleCarrier,     // Optimal with M = 1
  Narrowband,        // Optimal at bandwidth `parameter` (Hz)
};

struct Scheme {
  SchemeKind kind = SchemeKind::Random;
  double parameter = 0.0;

  /// random, ps_only, optimal, alternating, alternating_prior(<std>),
  /// single_carrier, narrowband(<bandwidth>).
  std::string name() const;
};

/// Inverse of Scheme::name(); throws InvalidArgument.
Scheme parse_scheme(std::string_view text);

struct ExperimentSettings {
  Index trials = 100;                // N_c
  std::uint64_t seed = 1;
  unsigned jobs = 0;                 // 0 = all cores
  Index ap_sweeps = 5;               // refinement sweeps of Algorithm 1
  Index joint_iterations = 10;       // K_t of the alternating schemes
  SearchGrid grid;
  DesignOptions design;
  DesignForm form = DesignForm::Surrogate;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view text);
/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t trial_seed(std::uint64_t master, std::string_view tag, Index sweep_index,
                         Index trial);
/// Independent sub-stream of a trial seed.
std::uint64_t stream_seed(std::uint64_t trial, std::uint64_t stream);

struct TrialOutcome {
  std::vector<PolarPosition> estimate;                  // matched to the true users
  std::vector<std::vector<PolarPosition>> trajectory;   // matched; alternating schemes only
  double crb = 0.0;  // of the combiner used for the final estimate, m
  double seconds = 0.0;
};

/// Scenario the scheme actually operates in (t_max = 0, M = 1, narrower band, ...).
Scenario scheme_scenario(const Scenario& base, const Scheme& scheme);

/// Combiner designed at the scenario's true users from a random start drawn from `start`.
AnalogCombiner design_at_truth(const Scenario& scenario, const ExperimentSettings& settings,
                               std::mt19937_64& start);

TrialOutcome run_trial(const Scenario& base, const Scheme& scheme,
                       const ExperimentSettings& settings, std::uint64_t seed);

/// Reorders `estimate` to the permutation with the smallest total squared error.
std::vector<PolarPosition> match_to_truth(const std::vector<PolarPosition>& truth,
                                          const std::vector<PolarPosition>& estimate);

double position_error(const PolarPosition& a, const PolarPosition& b);

/// (1/K) sum_k sqrt(mean_trials |p_k - p^_k|^2). Throws EmptyTrials.
double rmse(const std::vector<PolarPosition>& truth,
            const std::vector<std::vector<PolarPosition>>& estimates);

struct SchemeStats {
  double rmse = 0.0;          // m
  double median_error = 0.0;  // median over trials of the user-averaged error, m
  double crb = 0.0;           // RMS over trial combiners, m
  Index trials = 0;
  double seconds = 0.0;
};

SchemeStats summarize(const std::vector<PolarPosition>& truth,
                      const std::vector<TrialOutcome>& outcomes);

/// All trials of one scheme at one sweep point, run in parallel.
std::vector<TrialOutcome> run_trials(const Scenario& scenario, const Scheme& scheme,
                                     const ExperimentSettings& settings, std::string_view tag,
                                     Index sweep_index);

struct SnrRow {
  double snr_db;
  std::string scheme;
  SchemeStats stats;
};
std::vector<SnrRow> run_rmse_vs_snr(const Scenario& scenario, const std::vector<Scheme>& schemes,
                                    const std::vector<double>& snrs,
                                    const ExperimentSettings& settings);

struct ConvergenceRow {
  std::string scheme;
  Index iteration;
  double rmse;
  double median_error;
};
/// Alternating from a random combiner and from each prior std (m), plus the
/// random and optimal references repeated on every iteration.
std::vector<ConvergenceRow> run_convergence(const Scenario& scenario,
                                            const std::vector<double>& priors,
                                            const ExperimentSettings& settings);

struct HeatmapRun {
  Heatmap map;
  PolarPosition focal;
  AnalogCombiner combiner;
};
HeatmapRun run_heatmap(const Scenario& scenario, const PolarPosition& focal,
                       const HeatmapArea& area, double resolution, double snr_db,
                       const ExperimentSettings& settings);

struct NtRow {
  Index n_t;
  std::string scheme;
  SchemeStats stats;
  double design_value;  // mean design objective of the scheme's combiners (0 for random)
};
/// Schemes random, ps_only and optimal by default. The optimal design at each
/// N_t starts from the previous N_t's design lifted onto the finer delay bank.
std::vector<NtRow> run_rmse_vs_nt(const Scenario& scenario, const std::vector<Index>& n_t,
                                  const ExperimentSettings& settings,
                                  const std::vector<Scheme>& schemes = {
                                      {SchemeKind::Random, 0.0},
                                      {SchemeKind::PsOnly, 0.0},
                                      {SchemeKind::Optimal, 0.0}});

struct MRow {
  Index m;
  double snr_db;
  std::string scheme;
  SchemeStats stats;
};
std::vector<MRow> run_rmse_vs_m(const Scenario& scenario, const std::vector<Index>& m,
                                const std::vector<double>& snrs,
                                const std::vector<Scheme>& schemes,
                                const ExperimentSettings& settings);

struct TrackRow {
  Index trial;
  Index iteration;
  Index user;
  double x;
  double y;
};
std::vector<TrackRow> run_trackmap(const Scenario& scenario, const ExperimentSettings& settings);

void write_csv(std::ostream& out, const std::vector<SnrRow>& rows);
void write_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows);
void write_csv(std::ostream& out, const Heatmap& map);
void write_csv(std::ostream& out, const std::vector<NtRow>& rows);
void write_csv(std::ostream& out, const std::vector<MRow>& rows);
void write_csv(std::ostream& out, const std::vector<TrackRow>& rows);

}  // namespace nfloc
