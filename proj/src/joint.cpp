#include "nfloc/joint.hpp"

#include "nfloc/csv.hpp"

#include <algorithm>
#include <ostream>

namespace nfloc {

DesignObjective design_objective_for(const Scenario& scenario,
                                     const std::vector<PolarPosition>& targets, DesignForm form) {
  std::vector<PolarPosition> unique;
  for (const PolarPosition& p : targets) {
    if (std::find(unique.begin(), unique.end(), p) == unique.end()) unique.push_back(p);
  }
  const BandPlan band = scenario.band();
  const SteeringSet steering = steering_set(band, unique, scenario.geometry());
  return make_design_objective(band, steering, scenario.noise(), form);
}

JointResult joint_localize(const Scenario& scenario, const JointConfig& cfg,
                           AnalogCombiner combiner, std::mt19937_64& pilots) {
  if (cfg.iterations < 0) throw Error(Errc::InvalidArgument, "K_t must be non-negative");
  const ArrayGeometry geometry = scenario.geometry();
  const BandPlan band = scenario.band();
  const SteeringSet steering = scenario.steering();
  const NoiseModel noise = scenario.noise();
  const Index K = static_cast<Index>(scenario.users.size());

  JointResult out;
  ObservationBatch batch =
      synthesize_observations(steering, noise, combiner, band, scenario.snapshots, pilots);
  CombinedSteering model(geometry, band, combiner);
  EstimationResult est = ap_localize(batch, model, K, cfg.grid, 0);
  out.positions = est.positions;
  out.trajectory.push_back(out.positions);
  out.objective.push_back(est.objective.back());
  if (cfg.keep_combiners) out.combiners.push_back(combiner);

  for (Index t = 1; t <= cfg.iterations; ++t) {
    if (t > 1) {
      const DesignObjective obj = design_objective_for(scenario, out.positions, cfg.form);
      const DesignResult designed = alternate_design(combiner, obj, cfg.design);
      combiner = designed.combiner;
      out.design_value.push_back(designed.value);
      batch = synthesize_observations(steering, noise, combiner, band, scenario.snapshots, pilots);
      model = CombinedSteering(geometry, band, combiner);
    }
    est = ap_refine(batch, model, out.positions, cfg.grid, 1);
    out.positions = est.positions;
    out.trajectory.push_back(out.positions);
    out.objective.push_back(est.objective.back());
    if (cfg.keep_combiners) out.combiners.push_back(combiner);
  }
  return out;
}

JointResult joint_localize(const Scenario& scenario, const JointConfig& cfg,
                           std::mt19937_64& start, std::mt19937_64& pilots) {
  AnalogCombiner initial =
      random_combiner(scenario.layout(), scenario.t_max, scenario.delay_grid_points, start);
  return joint_localize(scenario, cfg, std::move(initial), pilots);
}

JointResult warm_start_with_prior(const Scenario& scenario, double prior_std,
                                  const JointConfig& cfg, std::mt19937_64& start,
                                  std::mt19937_64& prior, std::mt19937_64& pilots) {
  if (!(prior_std >= 0.0)) throw Error(Errc::InvalidArgument, "prior std must be non-negative");
  AnalogCombiner initial =
      random_combiner(scenario.layout(), scenario.t_max, scenario.delay_grid_points, start);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<PolarPosition> guess;
  for (const PolarPosition& p : scenario.users) {
    const CartesianPosition c = polar_to_cartesian(p);
    const double dx = prior_std * gauss(prior);
    const double dy = prior_std * gauss(prior);
    CartesianPosition q{c.x + dx, c.y + dy};
    // Keep the guess in front of the array.
    if (!(q.y > 0.0)) q.y = std::max(1e-3, -q.y);
    guess.push_back(cartesian_to_polar(q));
  }
  const DesignObjective obj = design_objective_for(scenario, guess, cfg.form);
  initial = alternate_design(initial, obj, cfg.design).combiner;
  return joint_localize(scenario, cfg, std::move(initial), pilots);
}

void write_trajectory_csv(std::ostream& out, const JointResult& result) {
  out << "iteration,user,d_est,theta_est,x_est,y_est\n";
  for (std::size_t t = 0; t < result.trajectory.size(); ++t) {
    for (std::size_t k = 0; k < result.trajectory[t].size(); ++k) {
      const PolarPosition& p = result.trajectory[t][k];
      const CartesianPosition c = polar_to_cartesian(p);
      out << t << ',' << k << ',' << format_number(p.d) << ',' << format_number(p.theta) << ','
          << format_number(c.x) << ',' << format_number(c.y) << '\n';
    }
  }
}

}  // namespace nfloc
