#include "nfloc/experiments.hpp"

#include "nfloc/csv.hpp"
#include "nfloc/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>

namespace nfloc {

namespace {

std::string parameter_text(double v) { return format_number(v); }

}  // namespace

std::string Scheme::name() const {
  switch (kind) {
    case SchemeKind::Random: return "random";
    case SchemeKind::PsOnly: return "ps_only";
    case SchemeKind::Optimal: return "optimal";
    case SchemeKind::Alternating: return "alternating";
    case SchemeKind::AlternatingPrior: return "alternating_prior(" + parameter_text(parameter) + ")";
    case SchemeKind::SingleCarrier: return "single_carrier";
    case SchemeKind::Narrowband: return "narrowband(" + parameter_text(parameter) + ")";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view text) {
  auto fail = [&] { throw Error(Errc::InvalidArgument, "unknown scheme '" + std::string(text) + "'"); };
  auto with_parameter = [&](std::string_view prefix, SchemeKind kind) -> std::optional<Scheme> {
    if (text.size() <= prefix.size() + 2 || text.substr(0, prefix.size()) != prefix ||
        text[prefix.size()] != '(' || text.back() != ')') {
      return std::nullopt;
    }
    const std::string inner(text.substr(prefix.size() + 1, text.size() - prefix.size() - 2));
    double value = 0.0;
    try {
      value = parse_number(inner);
    } catch (const Error&) {
      fail();
    }
    return Scheme{kind, value};
  };
  if (text == "random") return {SchemeKind::Random, 0.0};
  if (text == "ps_only") return {SchemeKind::PsOnly, 0.0};
  if (text == "optimal") return {SchemeKind::Optimal, 0.0};
  if (text == "alternating") return {SchemeKind::Alternating, 0.0};
  if (text == "single_carrier") return {SchemeKind::SingleCarrier, 0.0};
  if (auto s = with_parameter("alternating_prior", SchemeKind::AlternatingPrior)) {
    if (!(s->parameter >= 0.0)) fail();
    return *s;
  }
  if (auto s = with_parameter("narrowband", SchemeKind::Narrowband)) {
    if (!(s->parameter > 0.0)) fail();
    return *s;
  }
  fail();
  return {};
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t master, std::string_view tag, Index sweep_index,
                         Index trial) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ fnv1a(tag));
  h = splitmix64(h ^ static_cast<std::uint64_t>(sweep_index));
  return splitmix64(h ^ static_cast<std::uint64_t>(trial));
}

std::uint64_t stream_seed(std::uint64_t trial, std::uint64_t stream) {
  return splitmix64(trial ^ splitmix64(stream));
}

namespace {

enum Stream : std::uint64_t { kStart = 1, kPilots = 2, kPrior = 3 };

double combiner_crb(const Scenario& sc, const AnalogCombiner& combiner) {
  const NoiseModel noise = sc.noise();
  if (!(noise.variance.array() > 0.0).all()) return 0.0;
  return crb(fim_polar(sc.steering(), combiner, sc.band(), noise), sc.users).crb;
}

JointConfig joint_config(const ExperimentSettings& settings) {
  JointConfig cfg;
  cfg.iterations = settings.joint_iterations;
  cfg.grid = settings.grid;
  cfg.design = settings.design;
  cfg.form = settings.form;
  cfg.keep_combiners = true;
  return cfg;
}

std::vector<PolarPosition> localize(const Scenario& sc, const AnalogCombiner& combiner,
                                    const ExperimentSettings& settings, std::mt19937_64& pilots) {
  const BandPlan band = sc.band();
  const ObservationBatch batch =
      synthesize_observations(sc.steering(), sc.noise(), combiner, band, sc.snapshots, pilots);
  const CombinedSteering model(sc.geometry(), band, combiner);
  const Index K = static_cast<Index>(sc.users.size());
  return ap_localize(batch, model, K, settings.grid, settings.ap_sweeps).positions;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Scenario scheme_scenario(const Scenario& base, const Scheme& scheme) {
  Scenario sc = base;
  switch (scheme.kind) {
    case SchemeKind::PsOnly: sc.t_max = 0.0; break;
    case SchemeKind::SingleCarrier:
      sc.subcarriers = 1;
      sc.bandwidth = 0.0;
      break;
    case SchemeKind::Narrowband: sc.bandwidth = scheme.parameter; break;
    default: break;
  }
  sc.validate();
  return sc;
}

AnalogCombiner design_at_truth(const Scenario& sc, const ExperimentSettings& settings,
                               std::mt19937_64& start) {
  const AnalogCombiner init = random_combiner(sc.layout(), sc.t_max, sc.delay_grid_points, start);
  const DesignObjective obj = design_objective_for(sc, sc.users, settings.form);
  return alternate_design(init, obj, settings.design).combiner;
}

TrialOutcome run_trial(const Scenario& base, const Scheme& scheme,
                       const ExperimentSettings& settings, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario sc = scheme_scenario(base, scheme);
  std::mt19937_64 start(stream_seed(seed, kStart));
  std::mt19937_64 pilots(stream_seed(seed, kPilots));
  std::mt19937_64 prior(stream_seed(seed, kPrior));

  TrialOutcome out;
  std::optional<AnalogCombiner> combiner;
  switch (scheme.kind) {
    case SchemeKind::Random:
      combiner = random_combiner(sc.layout(), sc.t_max, sc.delay_grid_points, start);
      out.estimate = localize(sc, *combiner, settings, pilots);
      break;
    case SchemeKind::PsOnly:
    case SchemeKind::Optimal:
    case SchemeKind::SingleCarrier:
    case SchemeKind::Narrowband:
      combiner = design_at_truth(sc, settings, start);
      out.estimate = localize(sc, *combiner, settings, pilots);
      break;
    case SchemeKind::Alternating:
    case SchemeKind::AlternatingPrior: {
      const JointConfig cfg = joint_config(settings);
      const JointResult r =
          scheme.kind == SchemeKind::Alternating
              ? joint_localize(sc, cfg, start, pilots)
              : warm_start_with_prior(sc, scheme.parameter, cfg, start, prior, pilots);
      out.estimate = r.positions;
      for (const auto& step : r.trajectory) out.trajectory.push_back(match_to_truth(sc.users, step));
      combiner = r.combiners.back();
      break;
    }
  }
  out.estimate = match_to_truth(sc.users, out.estimate);
  out.crb = combiner_crb(sc, *combiner);
  out.seconds = seconds_since(t0);
  return out;
}

double position_error(const PolarPosition& a, const PolarPosition& b) {
  const CartesianPosition p = polar_to_cartesian(a);
  const CartesianPosition q = polar_to_cartesian(b);
  return std::hypot(p.x - q.x, p.y - q.y);
}

std::vector<PolarPosition> match_to_truth(const std::vector<PolarPosition>& truth,
                                          const std::vector<PolarPosition>& estimate) {
  if (truth.size() != estimate.size()) {
    throw Error(Errc::DimensionMismatch, "estimate and truth differ in user count");
  }
  std::vector<std::size_t> perm(truth.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::size_t> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
      const double e = position_error(truth[k], estimate[perm[k]]);
      cost += e * e;
    }
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::vector<PolarPosition> out;
  out.reserve(truth.size());
  for (const std::size_t j : best) out.push_back(estimate[j]);
  return out;
}

double rmse(const std::vector<PolarPosition>& truth,
            const std::vector<std::vector<PolarPosition>>& estimates) {
  if (estimates.empty()) throw Error(Errc::EmptyTrials, "RMSE needs at least one trial");
  if (truth.empty()) throw Error(Errc::InvalidArgument, "RMSE needs at least one user");
  double total = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    double sq = 0.0;
    for (const auto& trial : estimates) {
      if (trial.size() != truth.size()) {
        throw Error(Errc::DimensionMismatch, "trial estimate differs in user count");
      }
      const double e = position_error(truth[k], trial[k]);
      sq += e * e;
    }
    total += std::sqrt(sq / static_cast<double>(estimates.size()));
  }
  return total / static_cast<double>(truth.size());
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double trial_error(const std::vector<PolarPosition>& truth,
                   const std::vector<PolarPosition>& estimate) {
  double e = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) e += position_error(truth[k], estimate[k]);
  return e / static_cast<double>(truth.size());
}

}  // namespace

SchemeStats summarize(const std::vector<PolarPosition>& truth,
                      const std::vector<TrialOutcome>& outcomes) {
  std::vector<std::vector<PolarPosition>> estimates;
  std::vector<double> errors;
  SchemeStats s;
  double crb_sq = 0.0;
  for (const TrialOutcome& o : outcomes) {
    estimates.push_back(o.estimate);
    errors.push_back(trial_error(truth, o.estimate));
    crb_sq += o.crb * o.crb;
    s.seconds += o.seconds;
  }
  s.rmse = rmse(truth, estimates);
  s.median_error = median(errors);
  s.crb = std::sqrt(crb_sq / static_cast<double>(outcomes.size()));
  s.trials = static_cast<Index>(outcomes.size());
  return s;
}

std::vector<TrialOutcome> run_trials(const Scenario& scenario, const Scheme& scheme,
                                     const ExperimentSettings& settings, std::string_view tag,
                                     Index sweep_index) {
  if (settings.trials < 1) throw Error(Errc::EmptyTrials, "need at least one trial");
  std::vector<TrialOutcome> out(static_cast<std::size_t>(settings.trials));
  parallel_for(settings.trials, settings.jobs, [&](Index t) {
    out[static_cast<std::size_t>(t)] =
        run_trial(scenario, scheme, settings, trial_seed(settings.seed, tag, sweep_index, t));
  });
  return out;
}

std::vector<SnrRow> run_rmse_vs_snr(const Scenario& scenario, const std::vector<Scheme>& schemes,
                                    const std::vector<double>& snrs,
                                    const ExperimentSettings& settings) {
  std::vector<SnrRow> rows;
  for (std::size_t i = 0; i < snrs.size(); ++i) {
    Scenario sc = scenario;
    sc.snr_db = snrs[i];
    for (const Scheme& scheme : schemes) {
      const auto outcomes = run_trials(sc, scheme, settings, "rmse-vs-snr", static_cast<Index>(i));
      rows.push_back({snrs[i], scheme.name(), summarize(sc.users, outcomes)});
    }
  }
  return rows;
}

std::vector<ConvergenceRow> run_convergence(const Scenario& scenario,
                                            const std::vector<double>& priors,
                                            const ExperimentSettings& settings) {
  std::vector<Scheme> joint{{SchemeKind::Alternating, 0.0}};
  for (const double p : priors) joint.push_back({SchemeKind::AlternatingPrior, p});

  std::vector<ConvergenceRow> rows;
  const Index iterations = settings.joint_iterations;
  for (const Scheme& scheme : joint) {
    const auto outcomes = run_trials(scenario, scheme, settings, "convergence", 0);
    for (Index t = 0; t <= iterations; ++t) {
      std::vector<std::vector<PolarPosition>> at;
      std::vector<double> errors;
      for (const TrialOutcome& o : outcomes) {
        at.push_back(o.trajectory[static_cast<std::size_t>(t)]);
        errors.push_back(trial_error(scenario.users, at.back()));
      }
      rows.push_back({scheme.name(), t, rmse(scenario.users, at), median(errors)});
    }
  }
  for (const Scheme scheme : {Scheme{SchemeKind::Random, 0.0}, Scheme{SchemeKind::Optimal, 0.0}}) {
    const SchemeStats s = summarize(scenario.users, run_trials(scenario, scheme, settings, "convergence", 0));
    for (Index t = 0; t <= iterations; ++t) rows.push_back({scheme.name(), t, s.rmse, s.median_error});
  }
  return rows;
}

HeatmapRun run_heatmap(const Scenario& scenario, const PolarPosition& focal,
                       const HeatmapArea& area, double resolution, double snr_db,
                       const ExperimentSettings& settings) {
  Scenario sc = scenario;
  sc.users = {focal};
  sc.snr_db = snr_db;
  sc.validate();
  std::mt19937_64 start(stream_seed(trial_seed(settings.seed, "heatmap", 0, 0), kStart));
  AnalogCombiner combiner = design_at_truth(sc, settings, start);
  Heatmap map =
      crb_heatmap(area, resolution, sc.geometry(), sc.band(), combiner, snr_db, settings.jobs);
  return {std::move(map), focal, std::move(combiner)};
}

std::vector<NtRow> run_rmse_vs_nt(const Scenario& scenario, const std::vector<Index>& n_t,
                                  const ExperimentSettings& settings,
                                  const std::vector<Scheme>& schemes) {
  if (settings.trials < 1) throw Error(Errc::EmptyTrials, "need at least one trial");
  std::vector<Scenario> points;
  for (const Index nt : n_t) {
    Scenario sc = scenario;
    sc.ttds_per_chain = nt;
    if (sc.antennas % (sc.rf_chains * nt) != 0) {
      throw Error(Errc::InvalidLayout, "N is not divisible by N_d * " + std::to_string(nt));
    }
    sc.validate();
    points.push_back(std::move(sc));
  }
  for (const Scheme& s : schemes) {
    if (s.kind != SchemeKind::Random && s.kind != SchemeKind::PsOnly &&
        s.kind != SchemeKind::Optimal) {
      throw Error(Errc::InvalidArgument, "N_t sweep supports random, ps_only and optimal only");
    }
  }
  const std::size_t P = points.size(), S = schemes.size();
  // outcomes[(p * S + s) * trials + t]
  std::vector<TrialOutcome> outcomes(P * S * static_cast<std::size_t>(settings.trials));
  std::vector<double> values(outcomes.size(), 0.0);

  parallel_for(settings.trials, settings.jobs, [&](Index t) {
    // One seed for every N_t: the sweep compares hardware on identical pilots.
    const std::uint64_t seed = trial_seed(settings.seed, "rmse-vs-nt", 0, t);
    std::optional<AnalogCombiner> previous;
    for (std::size_t p = 0; p < P; ++p) {
      for (std::size_t s = 0; s < S; ++s) {
        const auto t0 = std::chrono::steady_clock::now();
        const Scenario sc = scheme_scenario(points[p], schemes[s]);
        std::mt19937_64 start(stream_seed(seed, kStart));
        std::mt19937_64 pilots(stream_seed(seed, kPilots));
        std::optional<AnalogCombiner> c;
        const DesignObjective obj = design_objective_for(sc, sc.users, settings.form);
        switch (schemes[s].kind) {
          case SchemeKind::Random:
            c = random_combiner(sc.layout(), sc.t_max, sc.delay_grid_points, start);
            break;
          case SchemeKind::PsOnly: c = design_at_truth(sc, settings, start); break;
          default:
            if (previous && sc.ttds_per_chain % previous->layout().ttds_per_chain == 0) {
              c = alternate_design(lift_delays(*previous, sc.ttds_per_chain), obj, settings.design)
                      .combiner;
            } else {
              c = design_at_truth(sc, settings, start);
            }
            previous = c;
            break;
        }
        const std::size_t slot = (p * S + s) * static_cast<std::size_t>(settings.trials) +
                                 static_cast<std::size_t>(t);
        TrialOutcome& o = outcomes[slot];
        o.estimate = match_to_truth(sc.users, localize(sc, *c, settings, pilots));
        o.crb = combiner_crb(sc, *c);
        o.seconds = seconds_since(t0);
        if (schemes[s].kind != SchemeKind::Random) values[slot] = design_objective_value(*c, obj);
      }
    }
  });

  std::vector<NtRow> rows;
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t s = 0; s < S; ++s) {
      const auto first = outcomes.begin() + static_cast<std::ptrdiff_t>((p * S + s) * settings.trials);
      const std::vector<TrialOutcome> group(first, first + settings.trials);
      const auto vfirst = values.begin() + static_cast<std::ptrdiff_t>((p * S + s) * settings.trials);
      const double mean_value = std::accumulate(vfirst, vfirst + settings.trials, 0.0) /
                                static_cast<double>(settings.trials);
      rows.push_back({points[p].ttds_per_chain, schemes[s].name(),
                      summarize(points[p].users, group), mean_value});
    }
  }
  return rows;
}

std::vector<MRow> run_rmse_vs_m(const Scenario& scenario, const std::vector<Index>& m,
                                const std::vector<double>& snrs,
                                const std::vector<Scheme>& schemes,
                                const ExperimentSettings& settings) {
  std::vector<MRow> rows;
  for (std::size_t i = 0; i < snrs.size(); ++i) {
    for (const Index mm : m) {
      Scenario sc = scenario;
      sc.snr_db = snrs[i];
      sc.subcarriers = mm;
      sc.validate();
      for (const Scheme& scheme : schemes) {
        // Seeds depend on the SNR point only, so the M comparison is paired.
        const auto outcomes = run_trials(sc, scheme, settings, "rmse-vs-m", static_cast<Index>(i));
        rows.push_back({mm, snrs[i], scheme.name(), summarize(sc.users, outcomes)});
      }
    }
  }
  return rows;
}

std::vector<TrackRow> run_trackmap(const Scenario& scenario, const ExperimentSettings& settings) {
  const auto outcomes = run_trials(scenario, {SchemeKind::Alternating, 0.0}, settings, "trackmap", 0);
  std::vector<TrackRow> rows;
  for (std::size_t n = 0; n < outcomes.size(); ++n) {
    const auto& traj = outcomes[n].trajectory;
    for (std::size_t t = 0; t < traj.size(); ++t) {
      for (std::size_t k = 0; k < traj[t].size(); ++k) {
        const CartesianPosition c = polar_to_cartesian(traj[t][k]);
        rows.push_back({static_cast<Index>(n), static_cast<Index>(t), static_cast<Index>(k), c.x, c.y});
      }
    }
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<SnrRow>& rows) {
  out << "snr_db,scheme,rmse_m,crb_m,n_trials\n";
  for (const SnrRow& r : rows) {
    out << format_number(r.snr_db) << ',' << r.scheme << ',' << format_number(r.stats.rmse) << ','
        << format_number(r.stats.crb) << ',' << r.stats.trials << '\n';
  }
}

void write_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows) {
  out << "scheme,iteration,rmse_m\n";
  for (const ConvergenceRow& r : rows) {
    out << r.scheme << ',' << r.iteration << ',' << format_number(r.rmse) << '\n';
  }
}

void write_csv(std::ostream& out, const Heatmap& map) {
  out << "x_m,y_m,crb_m\n";
  for (Index j = 0; j < map.ys.size(); ++j) {
    for (Index i = 0; i < map.xs.size(); ++i) {
      out << format_number(map.xs(i)) << ',' << format_number(map.ys(j)) << ','
          << format_number(map.crb(j, i)) << '\n';
    }
  }
}

void write_csv(std::ostream& out, const std::vector<NtRow>& rows) {
  out << "n_t,scheme,rmse_m\n";
  for (const NtRow& r : rows) out << r.n_t << ',' << r.scheme << ',' << format_number(r.stats.rmse) << '\n';
}

void write_csv(std::ostream& out, const std::vector<MRow>& rows) {
  out << "m_subcarriers,snr_db,scheme,rmse_m\n";
  for (const MRow& r : rows) {
    out << r.m << ',' << format_number(r.snr_db) << ',' << r.scheme << ','
        << format_number(r.stats.rmse) << '\n';
  }
}

void write_csv(std::ostream& out, const std::vector<TrackRow>& rows) {
  out << "trial,iteration,user,x_est,y_est\n";
  for (const TrackRow& r : rows) {
    out << r.trial << ',' << r.iteration << ',' << r.user << ',' << format_number(r.x) << ','
        << format_number(r.y) << '\n';
  }
}

}  // namespace nfloc
