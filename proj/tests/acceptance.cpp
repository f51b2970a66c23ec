// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   nfloc_acceptance [--only 1,5,12] [--trials N] [--jobs N]

#include "nfloc/analog_design.hpp"
#include "nfloc/cli.hpp"
#include "nfloc/config.hpp"
#include "nfloc/csv.hpp"
#include "nfloc/estimator.hpp"
#include "nfloc/experiments.hpp"
#include "nfloc/fisher.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <unistd.h>

using namespace nfloc;
namespace fs = std::filesystem;

namespace {

using CL = std::complex<long double>;
using MatrixCL = MatrixC<long double>;

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
  std::function<Verdict()> run;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

MatrixCL to_long(const MatrixXcd& m) { return m.cast<CL>(); }

// ---------------------------------------------------------------- 1

Verdict derivative_oracle() {
  const Scenario sc;
  const ArrayGeometry g = sc.geometry();
  const BandPlan band = sc.band();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> d(2.0, 20.0), th(0.1 * kPi, 0.9 * kPi);
  std::uniform_int_distribution<Index> pick_n(0, g.size() - 1), pick_m(0, band.size() - 1);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const PolarT<long double> p{d(rng), th(rng)};
    const Index n = pick_n(rng);
    const long double f = band.freqs(pick_m(rng));
    const long double hd = 1e-9L * p.d, ht = 1e-8L;
    const CL fd_d = (steering_vector(f, PolarT<long double>{p.d + hd, p.theta}, g)(n) -
                     steering_vector(f, PolarT<long double>{p.d - hd, p.theta}, g)(n)) /
                    (2 * hd);
    const CL fd_t = (steering_vector(f, PolarT<long double>{p.d, p.theta + ht}, g)(n) -
                     steering_vector(f, PolarT<long double>{p.d, p.theta - ht}, g)(n)) /
                    (2 * ht);
    const CL an_d = steering_derivative_distance(f, p, g)(n);
    const CL an_t = steering_derivative_angle(f, p, g)(n);
    // The reference element has no angular derivative; both sides must vanish.
    const auto rel = [](CL a, CL b) {
      return static_cast<double>(std::abs(a) > 0 ? std::abs(a - b) / std::abs(a) : std::abs(b));
    };
    worst = std::max({worst, rel(an_d, fd_d), rel(an_t, fd_t)});
  }
  return {worst < 1e-5, "worst relative error " + fmt(worst) + " over 100 tuples"};
}

// ---------------------------------------------------------------- 2

// F_ab = 2/(N_t N_s) sum_m Re{dmu_a^H dmu_b} / sigma_m^2 with mu_m = Q_m S_m(eta) c,
// differentiated numerically in long double.
MatrixXd numeric_fim(const std::vector<PolarPosition>& users, const ArrayGeometry& g,
                     const BandPlan& band, const AnalogCombiner& c, const NoiseModel& noise,
                     const VectorXcd& symbols) {
  const Index K = static_cast<Index>(users.size());
  const Index N = g.size();
  const double scale = 2.0 / static_cast<double>(c.layout().antennas_per_chain());
  MatrixXd F = MatrixXd::Zero(2 * K, 2 * K);
  for (Index m = 0; m < band.size(); ++m) {
    const long double f = band.freqs(m);
    const MatrixCL Q = to_long(combiner_matrix(c, band.freqs(m)));
    auto mu = [&](const std::vector<PolarT<long double>>& pos) {
      VectorC<long double> s = VectorC<long double>::Zero(N);
      for (Index k = 0; k < K; ++k) {
        s += steering_vector(f, pos[static_cast<std::size_t>(k)], g) * CL(symbols(k));
      }
      return VectorC<long double>(Q * s);
    };
    std::vector<PolarT<long double>> base;
    for (const auto& u : users) base.push_back({u.d, u.theta});
    MatrixCL G(Q.rows(), 2 * K);
    for (Index a = 0; a < 2 * K; ++a) {
      const std::size_t k = static_cast<std::size_t>(a % K);
      const bool angle = a >= K;
      const long double h = angle ? 1e-8L : 1e-9L * base[k].d;
      auto plus = base, minus = base;
      (angle ? plus[k].theta : plus[k].d) += h;
      (angle ? minus[k].theta : minus[k].d) -= h;
      G.col(a) = (mu(plus) - mu(minus)) / (2 * h);
    }
    F += (scale / noise.variance(m)) * (G.adjoint() * G).real().cast<double>();
  }
  return F;
}

Verdict fim_oracle() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> d(1.0, 6.0), th(0.2 * kPi, 0.8 * kPi), snr(-10.0, 10.0);
  std::uniform_int_distribution<int> coin(0, 1), pick_m(1, 4);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const Index N = coin(rng) ? 32 : 16;
    const Index K = 1 + coin(rng);
    const Index M = pick_m(rng);
    const ArrayGeometry g(N, 5e-4);
    const BandPlan band = subcarrier_frequencies(300e9, M > 1 ? 30e9 : 0.0, M);
    const CombinerLayout lay = layout_for(N, 1 + coin(rng), 2 + 2 * coin(rng));
    const AnalogCombiner c = random_combiner(lay, 5e-9, 64, rng);
    std::vector<PolarPosition> users;
    for (Index k = 0; k < K; ++k) users.push_back({d(rng), th(rng)});
    const SteeringSet steering = steering_set(band, users, g);
    const NoiseModel noise = noise_model_from_snr(snr(rng), steering);
    VectorXcd symbols(K);
    for (Index k = 0; k < K; ++k) symbols(k) = std::polar(1.0, phase(rng));

    const FimPolar inst = fim_polar(steering, c, band, noise, SymbolMode::Instantaneous, symbols);
    const FimPolar avg = fim_polar(steering, c, band, noise, SymbolMode::Averaged);
    const MatrixXd num_inst = numeric_fim(users, g, band, c, noise, symbols);
    const MatrixXd num_avg = numeric_fim(users, g, band, c, noise, VectorXcd::Ones(K));
    for (const auto& [an, num] : {std::pair{&inst.F, &num_inst}, std::pair{&avg.F, &num_avg}}) {
      for (int bi = 0; bi < 2; ++bi) {
        for (int bj = 0; bj < 2; ++bj) {
          const MatrixXd A = an->block(bi * K, bj * K, K, K);
          const MatrixXd B = num->block(bi * K, bj * K, K, K);
          // Cross blocks are normalized by the diagonal blocks they couple.
          const double ref =
              std::sqrt(an->block(bi * K, bi * K, K, K).norm() * an->block(bj * K, bj * K, K, K).norm());
          worst = std::max(worst, (A - B).norm() / ref);
        }
      }
    }
  }
  return {worst < 1e-4, "worst relative block error " + fmt(worst) + " over 10 scenarios"};
}

// ---------------------------------------------------------------- 3

Verdict combiner_algebra() {
  const Scenario sc;
  const BandPlan band = sc.band();
  std::mt19937_64 rng(303);
  double worst = 0.0;
  bool invariant = true;
  const double n = static_cast<double>(sc.layout().antennas_per_chain());
  for (int t = 0; t < 50; ++t) {
    const AnalogCombiner c = random_combiner(sc.layout(), sc.t_max, sc.delay_grid_points, rng);
    for (Index m = 0; m < band.size(); ++m) {
      const MatrixXcd Q = combiner_matrix(c, band.freqs(m));
      const MatrixXcd G = Q * Q.adjoint() - n * MatrixXcd::Identity(Q.rows(), Q.rows());
      worst = std::max(worst, G.cwiseAbs().maxCoeff());
    }
    const AnalogCombiner flat(c.layout(), c.phases(), MatrixXd::Zero(c.delays().rows(), c.delays().cols()), 0.0);
    const MatrixXcd Q0 = combiner_matrix(flat, band.freqs(0));
    for (Index m = 1; m < band.size(); ++m) invariant = invariant && combiner_matrix(flat, band.freqs(m)) == Q0;
  }
  return {worst < 1e-10 && invariant, "max |Q Q^H - N_t N_s I| = " + fmt(worst) +
                                          ", t_max = 0 combiner m-invariant: " + (invariant ? "yes" : "no")};
}

// ---------------------------------------------------------------- 4

bool non_decreasing(const std::vector<double>& h, double slack, double& worst_drop) {
  bool ok = true;
  for (std::size_t i = 1; i < h.size(); ++i) {
    const double drop = (h[i - 1] - h[i]) / std::abs(h[i - 1]);
    worst_drop = std::max(worst_drop, drop);
    ok = ok && drop <= slack;
  }
  return ok;
}

Verdict optimizer_monotonicity() {
  Scenario sc;
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> d(3.0, 15.0), th(0.2 * kPi, 0.8 * kPi);
  std::uniform_real_distribution<double> gauss_scale(-30.0, 5.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  bool ok = true;
  double worst_drop = 0.0, worst_modulus = 0.0;
  for (int t = 0; t < 20; ++t) {
    sc.users = {{d(rng), th(rng)}, {d(rng), th(rng)}};
    const DesignObjective obj = design_objective_for(sc, sc.users, DesignForm::Surrogate);
    const AnalogCombiner c = random_combiner(sc.layout(), sc.t_max, sc.delay_grid_points, rng);
    PhaseOptions po;
    po.max_iters = 100;
    const PhaseResult phases = optimize_phases(c, obj, po);
    ok = non_decreasing(phases.history, 1e-9, worst_drop) && ok;
    AnalogCombiner next = c;
    next.set_phases(phases.phases);
    const DelayResult delays = optimize_delays(next, obj);
    ok = non_decreasing(delays.history, 1e-9, worst_drop) && ok;

    // Retraction on vectors with wildly varying magnitudes.
    VectorXcd v(sc.antennas);
    for (Index n = 0; n < v.size(); ++n) {
      v(n) = std::pow(10.0, gauss_scale(rng)) * std::complex<double>(gauss(rng), gauss(rng));
    }
    const VectorXcd r = retract(v, c.phase_coefficients());
    worst_modulus = std::max(worst_modulus, (r.cwiseAbs().array() - 1.0).abs().maxCoeff());
  }
  ok = ok && worst_modulus <= 1e-14;
  return {ok, "largest relative decrease " + fmt(worst_drop) + ", retraction modulus error " +
                  fmt(worst_modulus) + " over 20 problems"};
}

// ---------------------------------------------------------------- 5

Verdict noiseless_localization() {
  bool ok = true;
  std::string detail;
  for (const std::vector<PolarPosition>& users :
       {std::vector<PolarPosition>{{8.0, kPi / 3.0}}, Scenario{}.users}) {
    Scenario sc;
    sc.users = users;
    sc.snr_db = std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(505);
    const AnalogCombiner c = random_combiner(sc.layout(), sc.t_max, sc.delay_grid_points, rng);
    const BandPlan band = sc.band();
    const ObservationBatch batch =
        synthesize_observations(sc.steering(), sc.noise(), c, band, sc.snapshots, rng);
    const CombinedSteering model(sc.geometry(), band, c);
    const SearchGrid grid;
    const Index K = static_cast<Index>(users.size());
    const auto est = match_to_truth(users, ap_localize(batch, model, K, grid, 5).positions);
    for (Index k = 0; k < K; ++k) {
      std::vector<PolarPosition> others = est;
      others.erase(others.begin() + k);
      const ProjectorSet P =
          others.empty() ? ProjectorSet{} : steering_projectors(model, others);
      const SearchResult cell = maximize_single_user(P, model, batch, grid, est[k]);
      const double err = position_error(users[k], est[k]);
      const double radius = cell.cell_radius();
      ok = ok && err <= radius && radius <= 0.01;
      detail += "K=" + std::to_string(K) + " user " + std::to_string(k) + ": error " + fmt(err) +
                " m, cell radius " + fmt(radius) + " m; ";
    }
  }
  return {ok, detail};
}

// ---------------------------------------------------------------- 6

Verdict heatmap_focusing(unsigned jobs) {
  const ScenarioConfig cfg;
  ExperimentSettings st = cfg.settings;
  st.jobs = jobs;
  const PolarPosition focal{8.0, kPi / 3.0};
  const HeatmapRun run = run_heatmap(cfg.scenario, focal, cfg.area, 0.2, -10.0, st);
  const Heatmap& map = run.map;
  Index bi = 0, bj = 0;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> finite;
  for (Index j = 0; j < map.ys.size(); ++j) {
    for (Index i = 0; i < map.xs.size(); ++i) {
      const double v = map.crb(j, i);
      if (!std::isfinite(v)) continue;
      finite.push_back(v);
      if (v < best) {
        best = v;
        bi = i;
        bj = j;
      }
    }
  }
  const CartesianPosition fc = polar_to_cartesian(focal);
  const double offset = std::hypot(map.xs(bi) - fc.x, map.ys(bj) - fc.y);

  Scenario sc = cfg.scenario;
  sc.users = {focal};
  sc.snr_db = -10.0;
  const double at_focal = crb(fim_polar(sc.steering(), run.combiner, sc.band(), sc.noise()), sc.users).crb;
  const double med = median(finite);
  const bool ok = offset <= 0.3 && at_focal < med;
  return {ok, "minimum cell " + fmt(offset) + " m from focal point; CRB at focal " + fmt(at_focal) +
                  " m vs map median " + fmt(med) + " m (" + std::to_string(map.cells()) + " cells)"};
}

// ---------------------------------------------------------------- 7-9

// Monte Carlo results shared between criteria 7, 8 and 9.
struct SnrCache {
  unsigned jobs = 0;
  Index trials = 50;
  std::map<std::string, SchemeStats> at_minus5;

  const SchemeStats& get(const Scheme& s) {
    const auto it = at_minus5.find(s.name());
    if (it != at_minus5.end()) return it->second;
    const ScenarioConfig cfg;
    ExperimentSettings st = cfg.settings;
    st.trials = trials;
    st.jobs = jobs;
    const auto outcomes = run_trials(cfg.scenario, s, st, "acceptance", 0);
    return at_minus5[s.name()] = summarize(cfg.scenario.users, outcomes);
  }
};

std::string stats_text(const std::string& name, const SchemeStats& s) {
  return name + " median " + fmt(s.median_error) + " m / rmse " + fmt(s.rmse) + " m";
}

Verdict scheme_ordering(SnrCache& cache) {
  const SchemeStats& opt = cache.get({SchemeKind::Optimal, 0.0});
  const SchemeStats& ps = cache.get({SchemeKind::PsOnly, 0.0});
  const SchemeStats& rnd = cache.get({SchemeKind::Random, 0.0});
  const bool order = opt.median_error < ps.median_error && ps.median_error < rnd.median_error;
  const bool bound = opt.rmse >= opt.crb;
  return {order && bound, stats_text("optimal", opt) + ", " + stats_text("ps_only", ps) + ", " +
                              stats_text("random", rnd) + "; CRB-O " + fmt(opt.crb) + " m"};
}

Verdict decimeter_claim(SnrCache& cache) {
  const SchemeStats& alt = cache.get({SchemeKind::Alternating, 0.0});
  const SchemeStats& rnd = cache.get({SchemeKind::Random, 0.0});
  const bool ok = alt.rmse < 0.1 && rnd.rmse > alt.rmse;
  return {ok, "alternating rmse " + fmt(alt.rmse) + " m (median " + fmt(alt.median_error) +
                  " m), random rmse " + fmt(rnd.rmse) + " m, ratio random/alternating " +
                  fmt(rnd.rmse / alt.rmse)};
}

double relative_gap(const SchemeStats& ps, const SchemeStats& opt) {
  return std::abs(ps.median_error - opt.median_error) / opt.median_error;
}

Verdict bandwidth_effect(SnrCache& cache) {
  const ScenarioConfig cfg;
  ExperimentSettings st = cfg.settings;
  st.trials = cache.trials;
  st.jobs = cache.jobs;
  Scenario narrow = cfg.scenario;
  narrow.bandwidth = 300e6;
  bool ok = true;
  std::string detail;
  const std::vector<double> snrs{0.0, 5.0};
  for (std::size_t i = 0; i < snrs.size(); ++i) {
    narrow.snr_db = snrs[i];
    const auto ps = summarize(narrow.users, run_trials(narrow, {SchemeKind::PsOnly, 0.0}, st,
                                                       "acceptance-narrowband", static_cast<Index>(i)));
    const auto opt = summarize(narrow.users, run_trials(narrow, {SchemeKind::Optimal, 0.0}, st,
                                                        "acceptance-narrowband", static_cast<Index>(i)));
    const double gap = relative_gap(ps, opt);
    ok = ok && gap < 0.25;
    detail += "B = 300 MHz, " + fmt(snrs[i]) + " dB: gap " + fmt(gap) + "; ";
  }
  const double wide = relative_gap(cache.get({SchemeKind::PsOnly, 0.0}), cache.get({SchemeKind::Optimal, 0.0}));
  ok = ok && wide > 0.25;
  detail += "B = 30 GHz, -5 dB: gap " + fmt(wide);
  return {ok, detail};
}

// ---------------------------------------------------------------- 10

Verdict ttd_trend(Index trials, unsigned jobs) {
  const ScenarioConfig cfg;
  ExperimentSettings st = cfg.settings;
  st.trials = trials;
  st.jobs = jobs;
  const std::vector<Index> nts{2, 8, 16, 32};
  const auto rows = run_rmse_vs_nt(cfg.scenario, nts, st, {{SchemeKind::Optimal, 0.0}});
  bool rmse_ok = true, value_ok = true;
  std::string detail = "median";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    detail += " N_t=" + std::to_string(rows[i].n_t) + ": " + fmt(rows[i].stats.median_error) + " m";
    if (i == 0) continue;
    rmse_ok = rmse_ok && rows[i].stats.median_error <= rows[i - 1].stats.median_error;
    value_ok = value_ok && rows[i].design_value >= rows[i - 1].design_value;
  }
  detail += "; design objective";
  for (const auto& r : rows) detail += " " + fmt(r.design_value, 6);
  return {rmse_ok && value_ok, detail};
}

// ---------------------------------------------------------------- 11

Verdict subcarrier_trend(Index trials, unsigned jobs) {
  const ScenarioConfig cfg;
  ExperimentSettings st = cfg.settings;
  st.trials = trials;
  st.jobs = jobs;
  Scenario sc = cfg.scenario;
  sc.ttds_per_chain = 8;
  const std::vector<Index> ms{1, 4, 12};
  const std::vector<Scheme> schemes{{SchemeKind::Random, 0.0}, {SchemeKind::PsOnly, 0.0},
                                    {SchemeKind::Optimal, 0.0}};
  const auto rows = run_rmse_vs_m(sc, ms, {-5.0}, schemes, st);
  auto at = [&](Index m, const std::string& scheme) -> const SchemeStats& {
    for (const auto& r : rows) {
      if (r.m == m && r.scheme == scheme) return r.stats;
    }
    throw Error(Errc::InvalidArgument, "missing row");
  };
  bool ok = true;
  std::string detail;
  for (const Scheme& s : schemes) {
    detail += s.name() + ":";
    for (std::size_t i = 0; i < ms.size(); ++i) {
      detail += " " + fmt(at(ms[i], s.name()).median_error);
      if (i > 0) ok = ok && at(ms[i], s.name()).median_error <= at(ms[i - 1], s.name()).median_error;
    }
    detail += "; ";
  }
  const double gap4 = relative_gap(at(4, "ps_only"), at(4, "optimal"));
  const double gap12 = relative_gap(at(12, "ps_only"), at(12, "optimal"));
  ok = ok && gap12 > gap4;
  detail += "gap M=4 " + fmt(gap4) + ", M=12 " + fmt(gap12);
  return {ok, detail};
}

// ---------------------------------------------------------------- 12

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict reproducibility() {
  const fs::path root = fs::temp_directory_path() / ("nfloc_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const ScenarioConfig small = parse_config_text(
      "n = 64\nn_d = 4\nn_t = 4\nm = 4\nl = 16\ntrials = 2\nsnr_list = -5, 5\n"
      "nt_list = 2, 4\nm_list = 1, 4\nm_snr_list = -5\njoint_iterations = 2\npriors = 0.5\n"
      "trackmap_trials = 2\nheatmap_resolution = 2\n");
  bool ok = true;
  std::string detail;
  std::ostringstream log, err;
  for (const std::string& e : experiment_names()) {
    const fs::path first = root / e / "first", second = root / e / "second";
    ScenarioConfig a = small;
    a.settings.jobs = 1;
    if (dispatch(e, a, first, log, err) != 0) {
      ok = false;
      detail += e + " failed: " + err.str();
      continue;
    }
    // Re-run from the manifest alone, on a different thread count.
    ScenarioConfig b = parse_config(first / "manifest.cfg");
    b.settings.jobs = 3;
    if (dispatch(e, b, second, log, err) != 0) {
      ok = false;
      detail += e + " re-run failed: " + err.str();
      continue;
    }
    std::size_t files = 0;
    bool same = true;
    for (const auto& entry : fs::directory_iterator(first)) {
      const fs::path other = second / entry.path().filename();
      same = same && fs::exists(other) && slurp(entry.path()) == slurp(other);
      ++files;
    }
    ok = ok && same;
    detail += e + (same ? " identical (" : " DIFFERS (") + std::to_string(files) + " files); ";
  }
  fs::remove_all(root);
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nfloc acceptance suite"};
  std::vector<int> only;
  Index trials = 50;
  unsigned jobs = 0;
  app.add_option("--only", only, "criteria to run (default: all)")->delimiter(',');
  app.add_option("--trials", trials, "Monte Carlo trials for criteria 7-11 (default 50)");
  app.add_option("--jobs", jobs, "worker threads (0 = all cores)");
  CLI11_PARSE(app, argc, argv);

  SnrCache cache;
  cache.jobs = jobs;
  cache.trials = trials;
  const std::vector<Criterion> criteria{
      {1, "derivative oracle", 10, derivative_oracle},
      {2, "FIM oracle", 60, fim_oracle},
      {3, "combiner algebra", 5, combiner_algebra},
      {4, "optimizer monotonicity", 60, optimizer_monotonicity},
      {5, "noiseless localization", 120, noiseless_localization},
      {6, "heatmap focusing", 600, [&] { return heatmap_focusing(jobs); }},
      {7, "scheme ordering", 1800, [&] { return scheme_ordering(cache); }},
      {8, "decimeter-to-centimeter", 1800, [&] { return decimeter_claim(cache); }},
      {9, "bandwidth effect", 1800, [&] { return bandwidth_effect(cache); }},
      {10, "TTD-count trend", 1800, [&] { return ttd_trend(trials, jobs); }},
      {11, "subcarrier trend", 1800, [&] { return subcarrier_trend(trials, jobs); }},
      {12, "reproducibility", 600, reproducibility},
  };

  if (trials != 50) std::cout << "note: Monte Carlo criteria use N_c = " << trials << "\n";
  int failed = 0, ran = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.limit_seconds;
    const bool pass = v.pass && in_time;
    ++ran;
    if (!pass) ++failed;
    std::cout << (pass ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << ": " << v.detail
              << " [" << fmt(secs, 3) << " s of " << c.limit_seconds << " s"
              << (in_time ? "" : ", over time limit") << "]" << std::endl;
  }
  std::cout << ran - failed << "/" << ran << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
