#include "nfloc/estimator.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>

namespace nfloc {

namespace {

// Residuals shorter than this fraction (squared) of the unprojected column are
// treated as annihilated.
constexpr double kZeroResidual = 1e-12;

}  // namespace

Projection projector(const MatrixXcd& X, double tol) {
  Projection out;
  out.matrix = MatrixXcd::Zero(X.rows(), X.rows());
  if (X.cols() == 0 || X.rows() == 0) return out;

  Eigen::JacobiSVD<MatrixXcd> svd(X, Eigen::ComputeThinU);
  const VectorXd& sv = svd.singularValues();
  const double largest = sv.size() > 0 ? sv(0) : 0.0;
  if (!(largest > 0.0)) {
    out.rank_deficient = true;
    return out;
  }
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > tol * largest) ++rank;
  out.rank = rank;
  out.rank_deficient = rank < X.cols();
  const auto U = svd.matrixU().leftCols(rank);
  out.matrix = U * U.adjoint();
  return out;
}

CombinedSteering::CombinedSteering(const ArrayGeometry& geometry, const BandPlan& band,
                                   const AnalogCombiner& combiner)
    : antennas_(geometry.size()),
      rf_chains_(combiner.layout().rf_chains),
      subcarriers_(band.size()),
      blocks_(combiner.layout().blocks()),
      ps_per_ttd_(combiner.layout().ps_per_ttd),
      ttds_per_chain_(combiner.layout().ttds_per_chain),
      freqs_(band.freqs),
      offsets_(geometry.offsets()),
      ttd_(combiner.ttd_phasors(band)) {
  if (combiner.layout().antennas() != geometry.size()) {
    throw Error(Errc::LayoutMismatch, "combiner layout does not match the array size");
  }
  if (band.size() < 1) throw Error(Errc::InvalidBand, "empty band plan");
  base_wavenumber_ = kTwoPi * band.freqs(0) / kSpeedOfLight;
  step_wavenumber_ = kTwoPi * band.step() / kSpeedOfLight;

  const VectorXcd a = combiner.phase_coefficients();
  a_re_.resize(antennas_);
  a_im_.resize(antennas_);
  for (Index n = 0; n < antennas_; ++n) {
    a_re_[n] = a(n).real();
    a_im_[n] = a(n).imag();
  }
  sum_re_.assign(blocks_ * subcarriers_, 0.0);
  sum_im_.assign(blocks_ * subcarriers_, 0.0);
}

void CombinedSteering::evaluate(const PolarPosition& p, MatrixXcd& out) const {
  const Index M = subcarriers_;
  std::fill(sum_re_.begin(), sum_re_.end(), 0.0);
  std::fill(sum_im_.begin(), sum_im_.end(), 0.0);

  const double two_d_cos = 2.0 * p.d * std::cos(p.theta);
  const double d2 = p.d * p.d;
  for (Index n = 0; n < antennas_; ++n) {
    const double r = offsets_(n);
    const double dist = std::sqrt(r * r + d2 - r * two_d_cos);
    const double base = base_wavenumber_ * dist;
    const double step = step_wavenumber_ * dist;
    // a_n * exp(-j k_1 dist), then repeated multiplication by exp(-j dk dist).
    const double zr = std::cos(base), zi = -std::sin(base);
    const double wr = std::cos(step), wi = -std::sin(step);
    double xr = a_re_[n] * zr - a_im_[n] * zi;
    double xi = a_re_[n] * zi + a_im_[n] * zr;
    double* sr = sum_re_.data() + (n / ps_per_ttd_) * M;
    double* si = sum_im_.data() + (n / ps_per_ttd_) * M;
    for (Index m = 0; m < M; ++m) {
      sr[m] += xr;
      si[m] += xi;
      const double t = xr * wr - xi * wi;
      xi = xr * wi + xi * wr;
      xr = t;
    }
  }

  out.setZero(rf_chains_, M);
  for (Index b = 0; b < blocks_; ++b) {
    const Index chain = b / ttds_per_chain_;
    const double* sr = sum_re_.data() + b * M;
    const double* si = sum_im_.data() + b * M;
    for (Index m = 0; m < M; ++m) {
      out(chain, m) += ttd_(m, b) * std::complex<double>(sr[m], si[m]);
    }
  }
  for (Index m = 0; m < M; ++m) out.col(m) *= path_gain(freqs_(m), p.d);
}

MatrixXcd CombinedSteering::evaluate(const PolarPosition& p) const {
  MatrixXcd out;
  evaluate(p, out);
  return out;
}

ProjectorSet steering_projectors(const CombinedSteering& model,
                                 const std::vector<PolarPosition>& positions, double tol) {
  ProjectorSet out;
  if (positions.empty()) return out;
  const Index M = model.subcarriers();
  const Index K = static_cast<Index>(positions.size());
  std::vector<MatrixXcd> columns;
  columns.reserve(positions.size());
  for (const auto& p : positions) columns.push_back(model.evaluate(p));
  out.reserve(M);
  MatrixXcd X(model.rf_chains(), K);
  for (Index m = 0; m < M; ++m) {
    for (Index k = 0; k < K; ++k) X.col(k) = columns[k].col(m);
    out.push_back(projector(X, tol).matrix);
  }
  return out;
}

MatrixXcd residual_steering(const PolarPosition& p, const ProjectorSet& previous,
                            const CombinedSteering& model) {
  MatrixXcd y = model.evaluate(p);
  if (previous.empty()) return y;
  for (Index m = 0; m < y.cols(); ++m) {
    const VectorXcd col = y.col(m);
    y.col(m) = col - previous[m] * col;
  }
  return y;
}

namespace {

// Objective from an already-evaluated Q_m s_m block.
double objective_from_columns(const MatrixXcd& y, const ProjectorSet& previous,
                              const ObservationBatch& batch) {
  double total = 0.0;
  VectorXcd residual(y.rows());
  for (Index m = 0; m < y.cols(); ++m) {
    const double full = y.col(m).squaredNorm();
    if (!(full > 0.0)) continue;
    if (previous.empty()) {
      residual = y.col(m);
    } else {
      residual.noalias() = y.col(m) - previous[m] * y.col(m);
    }
    const double norm = residual.squaredNorm();
    if (norm <= kZeroResidual * full) continue;
    total += (residual.adjoint() * batch.R[m] * residual).value().real() / norm;
  }
  return total;
}

}  // namespace

double single_user_objective(const PolarPosition& p, const ProjectorSet& previous,
                             const CombinedSteering& model, const ObservationBatch& batch) {
  if (batch.subcarriers() != model.subcarriers()) {
    throw Error(Errc::DimensionMismatch, "observation batch and model disagree on M");
  }
  return objective_from_columns(model.evaluate(p), previous, batch);
}

double full_likelihood(const std::vector<PolarPosition>& positions,
                       const CombinedSteering& model, const ObservationBatch& batch) {
  const ProjectorSet P = steering_projectors(model, positions);
  double total = 0.0;
  for (std::size_t m = 0; m < P.size(); ++m) {
    total += (P[m] * batch.R[m]).trace().real();
  }
  return total;
}

void SearchGrid::validate() const {
  if (!(d_min > 0.0) || !(d_max > d_min)) {
    throw Error(Errc::InvalidArgument, "search distance range must satisfy 0 < d_min < d_max");
  }
  if (!(theta_min > 0.0) || !(theta_max < kPi) || !(theta_max > theta_min)) {
    throw Error(Errc::InvalidArgument, "search angle range must lie inside (0, pi)");
  }
  if (coarse_d < 2 || coarse_theta < 2 || refine_d < 2 || refine_theta < 2 || starts < 1) {
    throw Error(Errc::InvalidArgument, "grid counts must be at least 2");
  }
  if (levels < 0 || !(refine_span > 0.0) || !(polish_tol > 0.0) || polish_evaluations < 0) {
    throw Error(Errc::InvalidArgument, "refinement settings must be non-negative");
  }
}

double SearchResult::cell_radius() const {
  const double dd = step_inverse_distance * position.d * position.d;
  const double dt = step_cosine / std::sin(position.theta) * position.d;
  return 0.5 * std::hypot(dd, dt);
}

namespace {

struct Box {
  double u_lo, u_hi;  // inverse distance
  double c_lo, c_hi;  // cosine of the angle
  Index nu, nc;

  double u_step() const { return (u_hi - u_lo) / static_cast<double>(nu - 1); }
  double c_step() const { return (c_hi - c_lo) / static_cast<double>(nc - 1); }
};

}  // namespace

SearchResult maximize_single_user(const ProjectorSet& previous, const CombinedSteering& model,
                                  const ObservationBatch& batch, const SearchGrid& grid,
                                  std::optional<PolarPosition> incumbent) {
  grid.validate();
  if (batch.subcarriers() != model.subcarriers()) {
    throw Error(Errc::DimensionMismatch, "observation batch and model disagree on M");
  }
  const double u_min = 1.0 / grid.d_max, u_max = 1.0 / grid.d_min;
  const double c_min = std::cos(grid.theta_max), c_max = std::cos(grid.theta_min);

  MatrixXcd y;
  SearchResult best;
  bool have_best = false;
  double best_u = 0.0, best_c = 0.0, last_value = 0.0;
  Index evaluations = 0;
  // Grid coordinates are taken about the array centre, where range and angle
  // errors decouple to first order.
  const double pivot = 0.5 * model.aperture();
  auto consider = [&](double u, double c) {
    const double r = 1.0 / u;
    const PolarPosition p =
        cartesian_to_polar(CartesianPosition{pivot + r * c, r * std::sqrt(1.0 - c * c)});
    model.evaluate(p, y);
    const double value = objective_from_columns(y, previous, batch);
    last_value = value;
    ++evaluations;
    if (!have_best || value > best.value) {
      best.value = value;
      best.position = p;
      best_u = u;
      best_c = c;
      have_best = true;
    }
  };
  auto u_at = [](const Box& box, Index i) {
    return i == box.nu - 1 ? box.u_hi : box.u_lo + static_cast<double>(i) * box.u_step();
  };
  auto c_at = [](const Box& box, Index j) {
    return j == box.nc - 1 ? box.c_hi : box.c_lo + static_cast<double>(j) * box.c_step();
  };
  // Scan in (d ascending, theta ascending) order: u and cos(theta) descending.
  auto scan = [&](const Box& box, MatrixXd* values) {
    for (Index i = box.nu - 1; i >= 0; --i) {
      for (Index j = box.nc - 1; j >= 0; --j) {
        consider(u_at(box, i), c_at(box, j));
        if (values) (*values)(i, j) = last_value;
      }
    }
  };

  // Nelder-Mead on -objective in cell-normalized coordinates, clamped to the box.
  auto polish = [&](double su, double sc) {
    best.step_inverse_distance = su;
    best.step_cosine = sc;
    if (grid.polish_evaluations < 3) return;
    const double u0 = best_u, c0 = best_c;
    struct Vertex {
      double x, y, f;
    };
    Index used = 0;
    auto eval = [&](double x, double y) {
      const double u = std::clamp(u0 + x * su, u_min, u_max);
      const double c = std::clamp(c0 + y * sc, c_min, c_max);
      consider(u, c);
      ++used;
      return Vertex{(u - u0) / su, (c - c0) / sc, -last_value};
    };
    std::array<Vertex, 3> v{Vertex{0.0, 0.0, -best.value}, eval(1.0, 0.0), eval(0.0, 1.0)};
    while (used + 2 <= grid.polish_evaluations) {
      std::sort(v.begin(), v.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
      const double size = std::max({std::abs(v[1].x - v[0].x), std::abs(v[2].x - v[0].x),
                                    std::abs(v[1].y - v[0].y), std::abs(v[2].y - v[0].y)});
      if (size < grid.polish_tol) break;
      const double mx = 0.5 * (v[0].x + v[1].x), my = 0.5 * (v[0].y + v[1].y);
      const Vertex r = eval(2.0 * mx - v[2].x, 2.0 * my - v[2].y);
      if (r.f < v[0].f) {
        const Vertex e = eval(3.0 * mx - 2.0 * v[2].x, 3.0 * my - 2.0 * v[2].y);
        v[2] = e.f < r.f ? e : r;
      } else if (r.f < v[1].f) {
        v[2] = r;
      } else {
        const Vertex& far = r.f < v[2].f ? r : v[2];
        const Vertex k = eval(0.5 * (mx + far.x), 0.5 * (my + far.y));
        if (k.f < far.f) {
          v[2] = k;
        } else {
          v[1] = eval(0.5 * (v[0].x + v[1].x), 0.5 * (v[0].y + v[1].y));
          v[2] = eval(0.5 * (v[0].x + v[2].x), 0.5 * (v[0].y + v[2].y));
        }
      }
    }
    double ex = 0.0, ey = 0.0;
    for (const Vertex& w : v) {
      ex = std::max(ex, std::abs(w.x - v[0].x));
      ey = std::max(ey, std::abs(w.y - v[0].y));
    }
    // The maximizer lies within the terminal simplex's bounding box around the
    // best vertex, so the box extent plays the role of a grid cell of twice that size.
    best.step_inverse_distance = 2.0 * std::max(ex, grid.polish_tol) * su;
    best.step_cosine = 2.0 * std::max(ey, grid.polish_tol) * sc;
  };

  const Box coarse{u_min, u_max, c_min, c_max, grid.coarse_d, grid.coarse_theta};
  MatrixXd values(coarse.nu, coarse.nc);
  scan(coarse, &values);

  // Strict-or-tied local maxima of the coarse scan, best first.
  struct Peak {
    double value;
    Index i, j;
  };
  std::vector<Peak> peaks;
  for (Index i = 0; i < coarse.nu; ++i) {
    for (Index j = 0; j < coarse.nc; ++j) {
      bool peak = true;
      for (Index di = -1; di <= 1 && peak; ++di) {
        for (Index dj = -1; dj <= 1 && peak; ++dj) {
          const Index a = i + di, b = j + dj;
          if ((di || dj) && a >= 0 && a < coarse.nu && b >= 0 && b < coarse.nc)
            peak = values(i, j) >= values(a, b);
        }
      }
      if (peak) peaks.push_back({values(i, j), i, j});
    }
  }
  // Descending value; ties in scan order (u, then cos(theta), descending).
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.i != b.i ? a.i > b.i : a.j > b.j;
  });
  if (peaks.size() > static_cast<std::size_t>(grid.starts)) peaks.resize(static_cast<std::size_t>(grid.starts));

  SearchResult overall;
  bool have_overall = false;
  for (const Peak& pk : peaks) {
    have_best = false;
    consider(u_at(coarse, pk.i), c_at(coarse, pk.j));
    Box box = coarse;
    for (Index level = 0; level < grid.levels; ++level) {
      const double hu = grid.refine_span * box.u_step();
      const double hc = grid.refine_span * box.c_step();
      box = Box{std::max(u_min, best_u - hu), std::min(u_max, best_u + hu),
                std::max(c_min, best_c - hc), std::min(c_max, best_c + hc), grid.refine_d,
                grid.refine_theta};
      scan(box, nullptr);
    }
    polish(box.u_step(), box.c_step());
    if (!have_overall || best.value > overall.value) {
      overall = best;
      have_overall = true;
    }
  }
  best = overall;
  best.evaluations = evaluations;
  if (incumbent) {
    const double value = single_user_objective(*incumbent, previous, model, batch);
    ++best.evaluations;
    if (value >= best.value) {
      best.value = value;
      best.position = *incumbent;
    }
  }
  return best;
}

namespace {

std::vector<PolarPosition> others(const std::vector<PolarPosition>& positions, std::size_t skip) {
  std::vector<PolarPosition> out;
  out.reserve(positions.size());
  for (std::size_t j = 0; j < positions.size(); ++j) {
    if (j != skip) out.push_back(positions[j]);
  }
  return out;
}

void run_sweeps(EstimationResult& result, const ObservationBatch& batch,
                const CombinedSteering& model, const SearchGrid& grid, Index sweeps) {
  bool converged = false;
  for (Index t = 0; t < sweeps; ++t) {
    if (!converged) {
      bool changed = false;
      for (std::size_t k = 0; k < result.positions.size(); ++k) {
        const ProjectorSet P = steering_projectors(model, others(result.positions, k));
        const SearchResult found =
            maximize_single_user(P, model, batch, grid, result.positions[k]);
        if (!(found.position == result.positions[k])) changed = true;
        result.positions[k] = found.position;
      }
      // An unchanged sweep is a fixed point: later sweeps would repeat it exactly.
      converged = !changed;
    }
    result.trajectory.push_back(result.positions);
    result.objective.push_back(converged && !result.objective.empty()
                                   ? result.objective.back()
                                   : full_likelihood(result.positions, model, batch));
  }
}

}  // namespace

EstimationResult ap_localize(const ObservationBatch& batch, const CombinedSteering& model,
                             Index users, const SearchGrid& grid, Index sweeps) {
  if (users < 1) throw Error(Errc::InvalidArgument, "need at least one user");
  if (sweeps < 0) throw Error(Errc::InvalidArgument, "sweep count must be non-negative");
  EstimationResult result;
  for (Index k = 0; k < users; ++k) {
    const ProjectorSet P = steering_projectors(model, result.positions);
    result.positions.push_back(maximize_single_user(P, model, batch, grid).position);
  }
  result.trajectory.push_back(result.positions);
  result.objective.push_back(full_likelihood(result.positions, model, batch));
  run_sweeps(result, batch, model, grid, sweeps);
  return result;
}

EstimationResult ap_refine(const ObservationBatch& batch, const CombinedSteering& model,
                           std::vector<PolarPosition> initial, const SearchGrid& grid,
                           Index sweeps) {
  if (initial.empty()) throw Error(Errc::InvalidArgument, "need at least one user");
  EstimationResult result;
  result.positions = std::move(initial);
  result.trajectory.push_back(result.positions);
  result.objective.push_back(full_likelihood(result.positions, model, batch));
  run_sweeps(result, batch, model, grid, sweeps);
  return result;
}

}  // namespace nfloc
