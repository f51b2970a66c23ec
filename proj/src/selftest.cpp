#include "nfloc/cli.hpp"

#include "nfloc/analog_design.hpp"
#include "nfloc/csv.hpp"
#include "nfloc/estimator.hpp"

#include <cmath>
#include <ostream>
#include <random>

namespace nfloc {

namespace {

// Central differences in long double against the analytic derivatives.
bool check_derivatives(std::ostream& log) {
  const ArrayGeometry g(32, 5e-4);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(1.0, 20.0), th(0.2, 2.9), f(285e9, 315e9);
  double worst = 0.0;
  for (int trial = 0; trial < 8; ++trial) {
    const PolarT<long double> p{d(rng), th(rng)};
    const long double freq = f(rng);
    const long double hd = 1e-9L * p.d, ht = 1e-8L;
    const VectorC<long double> fd_d =
        (steering_vector(freq, PolarT<long double>{p.d + hd, p.theta}, g) -
         steering_vector(freq, PolarT<long double>{p.d - hd, p.theta}, g)) / (2 * hd);
    const VectorC<long double> fd_t =
        (steering_vector(freq, PolarT<long double>{p.d, p.theta + ht}, g) -
         steering_vector(freq, PolarT<long double>{p.d, p.theta - ht}, g)) / (2 * ht);
    const auto an_d = steering_derivative_distance(freq, p, g);
    const auto an_t = steering_derivative_angle(freq, p, g);
    worst = std::max(worst, static_cast<double>((an_d - fd_d).norm() / an_d.norm()));
    worst = std::max(worst, static_cast<double>((an_t - fd_t).norm() / an_t.norm()));
  }
  const bool ok = worst < 1e-5;
  log << (ok ? "ok   " : "FAIL ") << "steering derivatives (worst rel. error " << worst << ")\n";
  return ok;
}

bool check_combiner_rows(std::ostream& log) {
  const CombinerLayout layout = layout_for(64, 4, 4);
  const BandPlan band = subcarrier_frequencies(300e9, 30e9, 4);
  std::mt19937_64 rng(12);
  double worst = 0.0;
  for (int trial = 0; trial < 4; ++trial) {
    const AnalogCombiner c = random_combiner(layout, 5e-9, 64, rng);
    for (Index m = 0; m < band.size(); ++m) {
      const MatrixXcd Q = combiner_matrix(c, band.freqs(m));
      const MatrixXcd G = Q * Q.adjoint();
      const double n = static_cast<double>(layout.antennas_per_chain());
      worst = std::max(worst, (G - n * MatrixXcd::Identity(G.rows(), G.cols())).norm() / n);
    }
  }
  const bool ok = worst < 1e-12;
  log << (ok ? "ok   " : "FAIL ") << "Q Q^H = N_t N_s I (worst " << worst << ")\n";
  return ok;
}

bool check_phase_ascent(std::ostream& log) {
  const ArrayGeometry g(64, 5e-4);
  const BandPlan band = subcarrier_frequencies(300e9, 30e9, 4);
  const DesignObjective obj =
      design_objective_at(g, band, {{6.0, kPi / 3.0}, {9.0, kPi / 2.0}}, -5.0);
  std::mt19937_64 rng(13);
  const AnalogCombiner c = random_combiner(layout_for(64, 2, 4), 5e-9, 16, rng);
  const PhaseProblem problem(c, obj);
  RcgState s = rcg_start(problem, c.phase_coefficients());
  bool monotone = true, unit = true, tangent = true;
  for (int k = 0; k < 20 && !s.stalled; ++k) {
    const RcgState next = riemannian_step(s, problem);
    monotone = monotone && next.value >= s.value - 1e-12 * std::abs(s.value);
    unit = unit && (next.a.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12;
    tangent = tangent &&
              (next.gradient.array() * next.a.conjugate().array()).real().abs().maxCoeff() <
                  1e-9 * std::max(1.0, next.gradient.cwiseAbs().maxCoeff());
    s = next;
  }
  const bool ok = monotone && unit && tangent;
  log << (ok ? "ok   " : "FAIL ") << "phase ascent monotone, unit modulus, tangent gradient\n";
  return ok;
}

bool check_noiseless_localization(std::ostream& log) {
  Scenario sc;
  sc.antennas = 64;
  sc.rf_chains = 4;
  sc.ttds_per_chain = 4;
  sc.subcarriers = 4;
  sc.snapshots = 8;
  sc.users = {{5.0, 1.1}};
  sc.snr_db = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(14);
  const AnalogCombiner c =
      random_combiner(sc.layout(), sc.t_max, sc.delay_grid_points, rng);
  const BandPlan band = sc.band();
  const ObservationBatch batch =
      synthesize_observations(sc.steering(), sc.noise(), c, band, sc.snapshots, rng);
  const CombinedSteering model(sc.geometry(), band, c);
  SearchGrid grid;
  grid.d_min = 1.0;
  grid.d_max = 10.0;
  const EstimationResult r = ap_localize(batch, model, 1, grid, 0);
  const double err = std::hypot(r.positions[0].d * std::cos(r.positions[0].theta) -
                                    sc.users[0].d * std::cos(sc.users[0].theta),
                                r.positions[0].d * std::sin(r.positions[0].theta) -
                                    sc.users[0].d * std::sin(sc.users[0].theta));
  const bool ok = err < 1e-3;
  log << (ok ? "ok   " : "FAIL ") << "noiseless single-user localization (error " << err
      << " m)\n";
  return ok;
}

bool check_number_round_trip(std::ostream& log) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> e(-30.0, 30.0), s(-1.0, 1.0);
  bool ok = true;
  for (int k = 0; k < 1000; ++k) {
    const double v = s(rng) * std::pow(10.0, e(rng));
    ok = ok && parse_number(format_number(v)) == v;
  }
  ok = ok && std::isinf(parse_number(format_number(-std::numeric_limits<double>::infinity())));
  log << (ok ? "ok   " : "FAIL ") << "number formatting round trip\n";
  return ok;
}

bool check_config_round_trip(std::ostream& log) {
  const std::string text = to_config_text(ScenarioConfig{});
  const bool ok = to_config_text(parse_config_text(text)) == text;
  log << (ok ? "ok   " : "FAIL ") << "config text round trip\n";
  return ok;
}

}  // namespace

bool run_selftest(std::ostream& log) {
  bool ok = true;
  ok = check_derivatives(log) && ok;
  ok = check_combiner_rows(log) && ok;
  ok = check_phase_ascent(log) && ok;
  ok = check_noiseless_localization(log) && ok;
  ok = check_number_round_trip(log) && ok;
  ok = check_config_round_trip(log) && ok;
  return ok;
}

}  // namespace nfloc
