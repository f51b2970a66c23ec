#include "nfloc/experiments.hpp"
#include "nfloc/joint.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace nfloc;

namespace {

Scenario small_scenario() {
  Scenario sc;
  sc.antennas = 32;
  sc.rf_chains = 2;
  sc.ttds_per_chain = 2;
  sc.subcarriers = 2;
  sc.snapshots = 16;
  sc.snr_db = 10.0;
  sc.users = {{3.0, 1.0}};
  return sc;
}

ExperimentSettings small_settings() {
  ExperimentSettings st;
  st.trials = 3;
  st.seed = 7;
  st.jobs = 1;
  st.ap_sweeps = 1;
  st.joint_iterations = 2;
  st.grid.d_min = 1.0;
  st.grid.d_max = 6.0;
  st.grid.coarse_d = 8;
  st.grid.coarse_theta = 64;
  st.design.outer_iters = 2;
  st.design.phases.max_iters = 30;
  st.design.delays.grid_points = 16;
  return st;
}

JointConfig small_joint() {
  const ExperimentSettings st = small_settings();
  JointConfig cfg;
  cfg.iterations = 3;
  cfg.grid = st.grid;
  cfg.design = st.design;
  cfg.keep_combiners = true;
  return cfg;
}

PolarPosition at(double x, double y) { return cartesian_to_polar({x, y}); }

}  // namespace

TEST_CASE("joint loop records one entry per iteration and is deterministic") {
  const Scenario sc = small_scenario();
  const JointConfig cfg = small_joint();
  std::mt19937_64 s1(1), p1(2), s2(1), p2(2);
  const JointResult a = joint_localize(sc, cfg, s1, p1);
  const JointResult b = joint_localize(sc, cfg, s2, p2);
  CHECK(a.trajectory.size() == 4);
  CHECK(a.objective.size() == 4);
  CHECK(a.design_value.size() == 2);
  CHECK(a.combiners.size() == 4);
  CHECK(a.positions == a.trajectory.back());
  REQUIRE(b.trajectory.size() == a.trajectory.size());
  for (std::size_t t = 0; t < a.trajectory.size(); ++t) CHECK(a.trajectory[t] == b.trajectory[t]);

  // The first two entries share the random combiner; redesigns follow.
  CHECK((a.combiners[0].phases() - a.combiners[1].phases()).norm() == 0.0);
  CHECK((a.combiners[1].phases() - a.combiners[2].phases()).norm() > 0.0);
}

TEST_CASE("zero-std prior starts from the design at the truth") {
  const Scenario sc = small_scenario();
  const ExperimentSettings st = small_settings();
  JointConfig cfg = small_joint();
  cfg.iterations = 0;
  std::mt19937_64 start(5), prior(6), pilots(7), start2(5);
  const JointResult r = warm_start_with_prior(sc, 0.0, cfg, start, prior, pilots);
  const AnalogCombiner truth = design_at_truth(sc, st, start2);
  REQUIRE(r.combiners.size() == 1);
  CHECK((r.combiners[0].phases() - truth.phases()).norm() < 1e-12);
  CHECK((r.combiners[0].delays() - truth.delays()).norm() == 0.0);
  CHECK_THROWS_AS(warm_start_with_prior(sc, -1.0, cfg, start, prior, pilots), Error);
}

TEST_CASE("duplicate targets are designed for once") {
  const Scenario sc = small_scenario();
  const DesignObjective one = design_objective_for(sc, {{3.0, 1.0}}, DesignForm::Surrogate);
  const DesignObjective two = design_objective_for(sc, {{3.0, 1.0}, {3.0, 1.0}}, DesignForm::Surrogate);
  CHECK(two.columns() == 1);
  CHECK((one.U[1] - two.U[1]).norm() == 0.0);
}

TEST_CASE("trajectory CSV") {
  JointResult r;
  r.trajectory = {{{2.0, kPi / 2}}, {{1.0, kPi / 2}}};
  std::ostringstream out;
  write_trajectory_csv(out, r);
  const std::string s = out.str();
  CHECK(s.rfind("iteration,user,d_est,theta_est,x_est,y_est\n", 0) == 0);
  CHECK(s.find("\n1,0,1,") != std::string::npos);
  CHECK(std::count(s.begin(), s.end(), '\n') == 3);
}

TEST_CASE("RMSE, matching and errors") {
  const std::vector<PolarPosition> one{at(0.0, 1.0)};
  CHECK(rmse(one, {one, one}) == 0.0);
  CHECK(rmse(one, {{at(0.3, 1.4)}}) == doctest::Approx(0.5));
  // sqrt of the mean squared error per user, then averaged over users.
  CHECK(rmse(one, {{at(0.1, 1.0)}, {at(0.0, 1.1)}}) == doctest::Approx(0.1));
  const std::vector<PolarPosition> two{at(0.0, 1.0), at(1.0, 1.0)};
  CHECK(rmse(two, {{at(0.1, 1.0), at(1.3, 1.0)}}) == doctest::Approx(0.2));
  CHECK_THROWS_AS(rmse(one, {}), Error);
  try {
    rmse(one, {});
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyTrials);
  }
  CHECK_THROWS_AS(rmse(one, {two}), Error);

  const auto m = match_to_truth(two, {at(1.1, 1.0), at(0.1, 1.0)});
  CHECK(position_error(m[0], two[0]) == doctest::Approx(0.1));
  CHECK(position_error(m[1], two[1]) == doctest::Approx(0.1));
  CHECK_THROWS_AS(match_to_truth(two, one), Error);
}

TEST_CASE("scheme names round trip") {
  const std::vector<Scheme> all{{SchemeKind::Random, 0.0},          {SchemeKind::PsOnly, 0.0},
                                {SchemeKind::Optimal, 0.0},         {SchemeKind::Alternating, 0.0},
                                {SchemeKind::AlternatingPrior, 0.5}, {SchemeKind::SingleCarrier, 0.0},
                                {SchemeKind::Narrowband, 300e6}};
  for (const Scheme& s : all) {
    const Scheme back = parse_scheme(s.name());
    CHECK(back.kind == s.kind);
    CHECK(back.parameter == s.parameter);
  }
  CHECK(Scheme{SchemeKind::Narrowband, 300e6}.name() == "narrowband(3e+08)");
  CHECK_THROWS_AS(parse_scheme("optimum"), Error);
  CHECK_THROWS_AS(parse_scheme("narrowband(0)"), Error);
  CHECK_THROWS_AS(parse_scheme("narrowband(x)"), Error);
  CHECK_THROWS_AS(parse_scheme("alternating_prior(-1)"), Error);
}

TEST_CASE("trial seeds depend on every coordinate and nothing else") {
  const auto s = trial_seed(1, "snr", 2, 3);
  CHECK(s == trial_seed(1, "snr", 2, 3));
  CHECK(s != trial_seed(2, "snr", 2, 3));
  CHECK(s != trial_seed(1, "snrx", 2, 3));
  CHECK(s != trial_seed(1, "snr", 3, 3));
  CHECK(s != trial_seed(1, "snr", 2, 4));
  CHECK(stream_seed(s, 1) != stream_seed(s, 2));
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("scheme scenarios") {
  const Scenario sc = small_scenario();
  CHECK(scheme_scenario(sc, {SchemeKind::PsOnly, 0.0}).t_max == 0.0);
  const Scenario single = scheme_scenario(sc, {SchemeKind::SingleCarrier, 0.0});
  CHECK(single.subcarriers == 1);
  CHECK(single.band().freqs(0) == sc.carrier);
  CHECK(scheme_scenario(sc, {SchemeKind::Narrowband, 1e9}).bandwidth == 1e9);
}

TEST_CASE("single carrier equals optimal at M = 1 on the same seed") {
  Scenario one = small_scenario();
  one.subcarriers = 1;
  one.bandwidth = 0.0;
  const ExperimentSettings st = small_settings();
  const TrialOutcome a = run_trial(small_scenario(), {SchemeKind::SingleCarrier, 0.0}, st, 99);
  const TrialOutcome b = run_trial(one, {SchemeKind::Optimal, 0.0}, st, 99);
  CHECK(a.estimate == b.estimate);
  CHECK(a.crb == b.crb);
}

TEST_CASE("trial results do not depend on the worker count") {
  const Scenario sc = small_scenario();
  ExperimentSettings st = small_settings();
  const auto serial = run_trials(sc, {SchemeKind::Alternating, 0.0}, st, "jobs", 0);
  st.jobs = 3;
  const auto parallel = run_trials(sc, {SchemeKind::Alternating, 0.0}, st, "jobs", 0);
  REQUIRE(serial.size() == 3);
  REQUIRE(parallel.size() == 3);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].estimate == parallel[i].estimate);
    CHECK(serial[i].crb == parallel[i].crb);
    CHECK(serial[i].trajectory.size() == 3);
  }
  const SchemeStats s = summarize(sc.users, serial);
  CHECK(s.trials == 3);
  CHECK(s.median_error <= s.rmse * 1.7320508075688772 + 1e-15);
  CHECK(s.crb > 0.0);
}

TEST_CASE("CSV headers") {
  std::ostringstream a, b, c, d, e;
  write_csv(a, std::vector<SnrRow>{{-5.0, "optimal", {0.25, 0.1, 0.01, 4, 1.0}}});
  CHECK(a.str() == "snr_db,scheme,rmse_m,crb_m,n_trials\n-5,optimal,0.25,0.01,4\n");
  write_csv(b, std::vector<ConvergenceRow>{{"alternating", 2, 0.5, 0.4}});
  CHECK(b.str() == "scheme,iteration,rmse_m\nalternating,2,0.5\n");
  write_csv(c, std::vector<NtRow>{{8, "random", {1.5, 1.0, 0.0, 2, 0.0}, 0.0}});
  CHECK(c.str() == "n_t,scheme,rmse_m\n8,random,1.5\n");
  write_csv(d, std::vector<MRow>{{4, -10.0, "ps_only", {0.125, 0.1, 0.0, 2, 0.0}}});
  CHECK(d.str() == "m_subcarriers,snr_db,scheme,rmse_m\n4,-10,ps_only,0.125\n");
  write_csv(e, std::vector<TrackRow>{{0, 1, 0, 1.5, 2.5}});
  CHECK(e.str() == "trial,iteration,user,x_est,y_est\n0,1,0,1.5,2.5\n");
}

TEST_CASE("ps_only results do not depend on the TTD count") {
  Scenario sc = small_scenario();
  ExperimentSettings st = small_settings();
  st.trials = 2;
  const auto rows = run_rmse_vs_nt(sc, {1, 2, 4}, st, {{SchemeKind::PsOnly, 0.0}});
  REQUIRE(rows.size() == 3);
  for (const NtRow& r : rows) {
    CHECK(r.stats.rmse == rows[0].stats.rmse);
    CHECK(r.design_value == doctest::Approx(rows[0].design_value).epsilon(1e-12));
  }
  CHECK_THROWS_AS(run_rmse_vs_nt(sc, {2}, st, {{SchemeKind::Alternating, 0.0}}), Error);
}
