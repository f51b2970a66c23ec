#include "nfloc/analog_design.hpp"

#include <algorithm>
#include <cmath>

namespace nfloc {

DesignObjective make_design_objective(const BandPlan& band, const SteeringSet& steering,
                                      const std::optional<NoiseModel>& noise, DesignForm form) {
  const Index M = band.size();
  if (steering.subcarriers() != M) {
    throw Error(Errc::DimensionMismatch, "steering and band disagree on M");
  }
  DesignObjective obj;
  obj.freqs = band.freqs;
  obj.weights = VectorXd::Ones(M);
  if (noise) {
    if (noise->variance.size() != M) throw Error(Errc::DimensionMismatch, "noise size differs from M");
    if ((noise->variance.array() > 0.0).all()) obj.weights = noise->variance.cwiseInverse();
  }
  obj.U.reserve(M);
  for (Index m = 0; m < M; ++m) {
    if (form == DesignForm::Surrogate) {
      obj.U.push_back(steering.D[m] + steering.B[m]);
    } else {
      MatrixXcd U(steering.antennas(), 2 * steering.users());
      U << steering.D[m], steering.B[m];
      obj.U.push_back(std::move(U));
    }
  }
  return obj;
}

DesignObjective design_objective_at(const ArrayGeometry& geometry, const BandPlan& band,
                                    const std::vector<PolarPosition>& targets, double snr_db,
                                    DesignForm form) {
  const SteeringSet steering = steering_set(band, targets, geometry);
  return make_design_objective(band, steering, noise_model_from_snr(snr_db, steering), form);
}

namespace {

MatrixXcd ttd_table(const AnalogCombiner& c, const VectorXd& freqs) {
  const Index blocks = c.layout().blocks();
  MatrixXcd tau(freqs.size(), blocks);
  for (Index m = 0; m < freqs.size(); ++m) {
    for (Index b = 0; b < blocks; ++b) tau(m, b) = std::polar(1.0, kTwoPi * freqs(m) * c.block_delay(b));
  }
  return tau;
}

void check_sizes(const AnalogCombiner& c, const DesignObjective& obj) {
  if (static_cast<Index>(obj.U.size()) != obj.subcarriers() ||
      obj.weights.size() != obj.subcarriers()) {
    throw Error(Errc::DimensionMismatch, "design objective is inconsistent");
  }
  for (const MatrixXcd& U : obj.U) {
    if (U.rows() != c.layout().antennas()) {
      throw Error(Errc::DimensionMismatch, "design objective rows differ from N");
    }
  }
}

// Per-block partial sums sum_{n in b} a_n U(n, k), blocks x columns.
MatrixXcd block_sums(const CombinerLayout& lay, const VectorXcd& a, const MatrixXcd& U) {
  MatrixXcd s = MatrixXcd::Zero(lay.blocks(), U.cols());
  for (Index k = 0; k < U.cols(); ++k) {
    for (Index n = 0; n < lay.antennas(); ++n) s(lay.block_of(n), k) += a(n) * U(n, k);
  }
  return s;
}

}  // namespace

PhaseProblem::PhaseProblem(const AnalogCombiner& combiner, const DesignObjective& obj)
    : layout_(combiner.layout()), obj_(obj) {
  check_sizes(combiner, obj);
  tau_ = ttd_table(combiner, obj.freqs);
}

void PhaseProblem::chain_outputs(const VectorXcd& a, Index m, Index k, VectorXcd& y) const {
  y.setZero(layout_.rf_chains);
  const Index Ns = layout_.ps_per_ttd;
  const MatrixXcd& U = obj_.U[m];
  for (Index b = 0; b < layout_.blocks(); ++b) {
    std::complex<double> acc = 0.0;
    for (Index n = b * Ns; n < (b + 1) * Ns; ++n) acc += a(n) * U(n, k);
    y(layout_.chain_of_block(b)) += tau_(m, b) * acc;
  }
}

double PhaseProblem::value(const VectorXcd& a) const {
  double g = 0.0;
  VectorXcd y;
  for (Index m = 0; m < obj_.subcarriers(); ++m) {
    double gm = 0.0;
    for (Index k = 0; k < obj_.columns(); ++k) {
      chain_outputs(a, m, k, y);
      gm += y.squaredNorm();
    }
    g += obj_.weights(m) * gm;
  }
  return g;
}

VectorXcd PhaseProblem::gradient(const VectorXcd& a) const {
  VectorXcd grad = VectorXcd::Zero(layout_.antennas());
  VectorXcd y;
  for (Index m = 0; m < obj_.subcarriers(); ++m) {
    const MatrixXcd& U = obj_.U[m];
    for (Index k = 0; k < obj_.columns(); ++k) {
      chain_outputs(a, m, k, y);
      for (Index n = 0; n < layout_.antennas(); ++n) {
        const Index b = layout_.block_of(n);
        grad(n) += 2.0 * obj_.weights(m) * std::conj(tau_(m, b) * U(n, k)) *
                   y(layout_.chain_of_block(b));
      }
    }
  }
  return grad;
}

MatrixXcd PhaseProblem::pruned_operator() const {
  const Index Nd = layout_.rf_chains;
  const Index K = obj_.columns();
  MatrixXcd W = MatrixXcd::Zero(obj_.subcarriers() * K * Nd, layout_.antennas());
  for (Index m = 0; m < obj_.subcarriers(); ++m) {
    const double sw = std::sqrt(obj_.weights(m));
    for (Index k = 0; k < K; ++k) {
      for (Index n = 0; n < layout_.antennas(); ++n) {
        const Index b = layout_.block_of(n);
        W((m * K + k) * Nd + layout_.chain_of_block(b), n) = sw * tau_(m, b) * obj_.U[m](n, k);
      }
    }
  }
  return W;
}

double design_objective_value(const AnalogCombiner& combiner, const DesignObjective& obj) {
  return PhaseProblem(combiner, obj).value(combiner.phase_coefficients());
}

VectorXcd project_tangent(const VectorXcd& v, const VectorXcd& a) {
  return v - ((v.array() * a.array().conjugate()).real().cast<std::complex<double>>() * a.array())
                 .matrix();
}

VectorXcd retract(const VectorXcd& v, const VectorXcd& fallback) {
  VectorXcd out(v.size());
  for (Index n = 0; n < v.size(); ++n) {
    const double r = std::abs(v(n));
    out(n) = r > 0.0 ? v(n) / r : fallback(n);
  }
  return out;
}

RcgState rcg_start(const PhaseProblem& problem, const VectorXcd& a) {
  RcgState s;
  s.a = a;
  s.value = problem.value(a);
  s.gradient = project_tangent(problem.gradient(a), a);
  s.direction = s.gradient;
  return s;
}

RcgState riemannian_step(const RcgState& state, const PhaseProblem& problem,
                         const ArmijoOptions& armijo) {
  RcgState out = state;
  out.stalled = false;

  VectorXcd dir = state.direction;
  double slope = (dir.adjoint() * state.gradient).real()(0);
  if (!(slope > 0.0)) {
    dir = state.gradient;
    slope = state.gradient.squaredNorm();
  }
  const double peak = dir.cwiseAbs().maxCoeff();
  if (!(slope > 0.0) || !(peak > 0.0)) {
    out.stalled = true;
    return out;
  }
  // Step lengths are measured against a direction scaled to unit peak modulus,
  // so the Armijo constants do not depend on the magnitude of g.
  dir /= peak;
  slope /= peak;

  double step = armijo.initial_step;
  for (Index t = 0; t <= armijo.max_backtracks; ++t, step *= armijo.backtrack) {
    const VectorXcd cand = retract(state.a + step * dir, state.a);
    const double v = problem.value(cand);
    if (v >= state.value + armijo.sufficient_increase * step * slope) {
      const VectorXcd grad = project_tangent(problem.gradient(cand), cand);
      const VectorXcd moved_dir = project_tangent(dir, cand);
      const VectorXcd moved_grad = project_tangent(state.gradient, cand);
      const double denom = state.gradient.squaredNorm();
      double zeta = denom > 0.0 ? (grad.adjoint() * (grad - moved_grad)).real()(0) / denom : 0.0;
      zeta = std::max(zeta, 0.0);
      out.a = cand;
      out.value = v;
      out.gradient = grad;
      out.direction = grad + zeta * moved_dir;
      out.step = step;
      out.zeta = zeta;
      out.iteration = state.iteration + 1;
      return out;
    }
  }
  out.stalled = true;
  return out;
}

PhaseResult optimize_phases(const AnalogCombiner& combiner, const DesignObjective& obj,
                            const PhaseOptions& options) {
  const PhaseProblem problem(combiner, obj);
  RcgState state = rcg_start(problem, combiner.phase_coefficients());
  RcgState best = state;

  PhaseResult out;
  out.history.push_back(state.value);
  for (Index it = 0; it < options.max_iters; ++it) {
    RcgState next = riemannian_step(state, problem, options.armijo);
    if (next.stalled) {
      out.stalled = true;
      break;
    }
    const double change = std::abs(next.value - state.value);
    state = std::move(next);
    out.history.push_back(state.value);
    ++out.iterations;
    if (state.value > best.value) best = state;
    if (change < options.tol * std::abs(state.value)) break;
  }
  out.phases = best.a.array().arg().matrix();
  out.value = best.value;
  return out;
}

DelayResult optimize_delays(const AnalogCombiner& combiner, const DesignObjective& obj,
                            const DelaySearchConfig& cfg) {
  check_sizes(combiner, obj);
  const CombinerLayout& lay = combiner.layout();
  const Index M = obj.subcarriers();
  const Index K = obj.columns();
  const Index Nt = lay.ttds_per_chain;
  const VectorXd grid = delay_grid(combiner.t_max(), cfg.grid_points);
  const VectorXcd a = combiner.phase_coefficients();

  // s[m](b, k) fixed by the phases; y[m](i, k) the chain outputs.
  std::vector<MatrixXcd> s(M), y(M);
  MatrixXd delays = combiner.delays();
  for (Index m = 0; m < M; ++m) {
    s[m] = block_sums(lay, a, obj.U[m]);
    y[m] = MatrixXcd::Zero(lay.rf_chains, K);
    for (Index b = 0; b < lay.blocks(); ++b) {
      y[m].row(lay.chain_of_block(b)) +=
          std::polar(1.0, kTwoPi * obj.freqs(m) * combiner.block_delay(b)) * s[m].row(b);
    }
  }
  auto total = [&] {
    double g = 0.0;
    for (Index m = 0; m < M; ++m) g += obj.weights(m) * y[m].squaredNorm();
    return g;
  };

  DelayResult out;
  out.value = total();
  out.history.push_back(out.value);
  if (combiner.t_max() == 0.0) {
    out.delays = delays;
    return out;
  }

  std::vector<MatrixXcd> phasors(M);  // M of (grid x 1)
  for (Index m = 0; m < M; ++m) {
    phasors[m].resize(grid.size(), 1);
    for (Index q = 0; q < grid.size(); ++q) phasors[m](q) = std::polar(1.0, kTwoPi * obj.freqs(m) * grid(q));
  }

  std::vector<VectorXcd> rest(M);
  for (Index sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    bool changed = false;
    for (Index b = 0; b < lay.blocks(); ++b) {
      const Index i = lay.chain_of_block(b);
      const Index l = b % Nt;
      const double t_old = delays(i, l);
      // Chain i's objective share as a function of this block's phasor.
      double base = 0.0;
      for (Index m = 0; m < M; ++m) {
        const std::complex<double> old = std::polar(1.0, kTwoPi * obj.freqs(m) * t_old);
        rest[m] = y[m].row(i).transpose() - old * s[m].row(b).transpose();
      }
      auto share = [&](auto&& phasor_of) {
        double v = 0.0;
        for (Index m = 0; m < M; ++m) {
          const std::complex<double> p = phasor_of(m);
          v += obj.weights(m) * (rest[m] + p * s[m].row(b).transpose()).squaredNorm();
        }
        return v;
      };
      base = share([&](Index m) { return std::polar(1.0, kTwoPi * obj.freqs(m) * t_old); });
      double best = base;
      Index best_q = -1;
      for (Index q = 0; q < grid.size(); ++q) {
        const double v = share([&](Index m) { return phasors[m](q); });
        if (v > best) {
          best = v;
          best_q = q;
        }
      }
      if (best_q >= 0 && best > base + 1e-12 * std::abs(base) && grid(best_q) != t_old) {
        delays(i, l) = grid(best_q);
        for (Index m = 0; m < M; ++m) {
          y[m].row(i) = (rest[m] + phasors[m](best_q) * s[m].row(b).transpose()).transpose();
        }
        changed = true;
      }
      out.history.push_back(total());
    }
    ++out.sweeps;
    if (!changed) break;
  }
  out.delays = delays;
  out.value = total();
  return out;
}

DesignResult alternate_design(const AnalogCombiner& start, const DesignObjective& obj,
                              const DesignOptions& options) {
  DesignResult out{start, design_objective_value(start, obj), 0, {}};
  out.history.push_back(out.value);
  for (Index it = 0; it < options.outer_iters; ++it) {
    const double before = out.value;
    const PhaseResult ph = optimize_phases(out.combiner, obj, options.phases);
    if (ph.value >= out.value) {
      out.combiner.set_phases(ph.phases);
      out.value = ph.value;
    }
    if (out.combiner.t_max() > 0.0) {
      const DelayResult dl = optimize_delays(out.combiner, obj, options.delays);
      if (dl.value >= out.value) {
        out.combiner.set_delays(dl.delays);
        out.value = dl.value;
      }
    }
    out.history.push_back(out.value);
    ++out.outer_iterations;
    if (std::abs(out.value - before) < options.tol * std::abs(out.value)) break;
  }
  return out;
}

AnalogCombiner lift_delays(const AnalogCombiner& combiner, Index ttds_per_chain) {
  const CombinerLayout& lay = combiner.layout();
  if (ttds_per_chain < lay.ttds_per_chain || ttds_per_chain % lay.ttds_per_chain != 0 ||
      lay.antennas_per_chain() % ttds_per_chain != 0) {
    throw Error(Errc::InvalidLayout, "target TTD count must refine the current blocks");
  }
  const Index factor = ttds_per_chain / lay.ttds_per_chain;
  const CombinerLayout fine{lay.rf_chains, ttds_per_chain, lay.antennas_per_chain() / ttds_per_chain};
  MatrixXd delays(lay.rf_chains, ttds_per_chain);
  for (Index i = 0; i < lay.rf_chains; ++i) {
    for (Index l = 0; l < ttds_per_chain; ++l) delays(i, l) = combiner.delays()(i, l / factor);
  }
  return AnalogCombiner(fine, combiner.phases(), delays, combiner.t_max());
}

}  // namespace nfloc
