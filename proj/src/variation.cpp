#include "respde/variation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "respde/penalty.hpp"

namespace respde {

namespace {

constexpr double kKinkWindow = 1e-12;

void check_source(const Grid& g, SourceCell s) {
  if (s.j < 1 || s.j > g.nx - 1) throw std::invalid_argument("variation: source j not interior");
  if (s.m < 0 || s.m > g.nt - 1) throw std::invalid_argument("variation: source m out of range");
}

// Explicit-substep linearisation: d_i *= 1 + dt*f' + sigma' * xi * sqrt(dt/dx),
// coefficients read along the base trajectory at time n. The seed step skips
// this stage: the state at step m does not depend on its own increment.
void apply_explicit_factors(const Solver& solver, const SolutionPath& path,
                            const NoiseField& noise, int n, std::vector<double>& d) {
  const Grid& g = solver.grid();
  const SolverConfig& cfg = solver.config();
  const double dt = g.dt();
  const double tn = g.t(n);
  for (int i = 1; i < g.nx; ++i) {
    if (d[i] == 0.0) continue;
    const double x = g.x(i);
    const double u = path.u(n, i);
    d[i] *= 1.0 + dt * cfg.coeffs.f.deriv(x, tn, u) +
            cfg.coeffs.sigma.deriv(x, tn, u) * solver.noise_scale() * noise.xi(n, i);
  }
}

// Implicit stages of step n -> n+1: the diffusion solve, then (optionally)
// the penalty linearisation factor 1/(1 - dt*(up' - down')) at the accepted
// state. kinks (Hard penalty only) collects cells within the kink window.
void apply_implicit_stages(const Solver& solver, const SolutionPath& path, int n,
                           std::vector<double>& d, bool with_penalty,
                           std::vector<std::pair<int, int>>* kinks) {
  const Grid& g = solver.grid();
  const SolverConfig& cfg = solver.config();
  const int nx = g.nx;
  const double dt = g.dt();

  solver.diffusion().solve_in_place(std::span<double>(d).subspan(1, nx - 1));
  if (!with_penalty) return;
  for (int i = 1; i < nx; ++i) {
    const double u1 = path.u(n + 1, i);
    const double lo = solver.wall_lower(n + 1, i);
    const double hi = solver.wall_upper(n + 1, i);
    const double p = penalty_up_derivative(u1, lo, cfg.delta, cfg.penalty) -
                     penalty_down_derivative(u1, hi, cfg.epsilon, cfg.penalty);
    if (p != 0.0) d[i] /= 1.0 - dt * p;
    if (kinks != nullptr && cfg.penalty == PenaltyKind::Hard &&
        (std::abs(u1 - lo) < kKinkWindow || std::abs(hi - u1) < kKinkWindow)) {
      kinks->emplace_back(i, n + 1);
    }
  }
}

// Shared driver: seeds at the source, runs the recursion to the final time,
// recording every row.
FirstVariationField run_recursion(const Solver& solver, const SolutionPath& path,
                                  const NoiseField& noise, SourceCell src, double seed_value,
                                  bool with_penalty) {
  const Grid& g = solver.grid();
  check_source(g, src);

  FirstVariationField field;
  field.source = src;
  field.seed = path.seed;
  field.D = Matrix(g.nt + 1, g.nx + 1);

  std::vector<double> d(g.nx + 1, 0.0);
  d[src.j] = seed_value;
  apply_implicit_stages(solver, path, src.m, d, with_penalty, &field.kink_cells);
  for (int i = 0; i <= g.nx; ++i) field.D(src.m + 1, i) = d[i];
  for (int n = src.m + 1; n < g.nt; ++n) {
    apply_explicit_factors(solver, path, noise, n, d);
    apply_implicit_stages(solver, path, n, d, with_penalty, &field.kink_cells);
    for (int i = 0; i <= g.nx; ++i) field.D(n + 1, i) = d[i];
  }
  return field;
}

double sigma_at_source(const Solver& solver, const SolutionPath& path, SourceCell src) {
  const Grid& g = solver.grid();
  return solver.config().coeffs.sigma.value(g.x(src.j), g.t(src.m), path.u(src.m, src.j));
}

}  // namespace

FirstVariationField first_variation(const Solver& solver, const SolutionPath& path,
                                    const NoiseField& noise, SourceCell source) {
  check_source(solver.grid(), source);  // before sigma_at_source reads the path
  const double seed = sigma_at_source(solver, path, source) / solver.grid().dx();
  // The seed overwrites d at the source; the state there at step m does not
  // depend on its own step-m increment, so no explicit factor applies yet.
  return run_recursion(solver, path, noise, source, seed, /*with_penalty=*/true);
}

FirstVariationField factorized_variation(const Solver& solver, const SolutionPath& path,
                                         const FirstVariationField& d) {
  if (!(solver.config().coeffs.sigma_min > 0.0))
    throw std::domain_error("factorized_variation: requires a declared sigma_min > 0");
  const double s = sigma_at_source(solver, path, d.source);
  FirstVariationField out = d;
  for (double& v : out.D.data()) v /= s;
  return out;
}

FirstVariationField dominating_variation(const Solver& solver, const SolutionPath& path,
                                         const NoiseField& noise, SourceCell source) {
  const double seed = 1.0 / solver.grid().dx();
  return run_recursion(solver, path, noise, source, seed, /*with_penalty=*/false);
}

double variation_value_at(const Solver& solver, const SolutionPath& path, const NoiseField& noise,
                          SourceCell source, int x0_index, int t0_index) {
  const Grid& g = solver.grid();
  check_source(g, source);
  if (t0_index <= source.m) return 0.0;

  std::vector<double> d(g.nx + 1, 0.0);
  d[source.j] = sigma_at_source(solver, path, source) / g.dx();
  apply_implicit_stages(solver, path, source.m, d, true, nullptr);
  for (int n = source.m + 1; n < t0_index; ++n) {
    apply_explicit_factors(solver, path, noise, n, d);
    apply_implicit_stages(solver, path, n, d, true, nullptr);
  }
  return d[x0_index];
}

LocalizedVariation localized_variation(const Solver& solver, const SolutionPath& path,
                                       const NoiseField& noise, int y_index, int s_index,
                                       int x0_index) {
  const Grid& g = solver.grid();
  if (y_index < 0 || x0_index <= y_index || x0_index >= g.nx)
    throw std::invalid_argument("localized_variation: need 0 <= y < x0 < 1 on the grid");
  if (s_index < 0 || s_index >= g.nt)
    throw std::invalid_argument("localized_variation: s out of range");
  const int ytilde = std::min(2 * x0_index - y_index, g.nx);
  if (ytilde - y_index < 4)
    throw std::invalid_argument("localized_variation: subinterval shorter than 4 cells");

  LocalizedVariation loc;
  loc.y_index = y_index;
  loc.s_index = s_index;
  loc.x0_index = x0_index;
  loc.ytilde_index = ytilde;
  loc.w = Matrix(g.nt + 1, g.nx + 1);

  const SolverConfig& cfg = solver.config();
  const int n_sub = ytilde - y_index - 1;  // interior unknowns of the subinterval
  const TridiagSolver sub_tri(n_sub, g.dt() / (g.dx() * g.dx()));

  std::vector<double> w(g.nx + 1, 0.0);
  const double ts = g.t(s_index);
  for (int i = y_index + 1; i < ytilde; ++i)
    w[i] = cfg.coeffs.sigma.value(g.x(i), ts, path.u(s_index, i));
  for (int i = y_index; i <= ytilde; ++i) loc.w(s_index, i) = w[i];

  const double dt = g.dt();
  for (int n = s_index; n < g.nt; ++n) {
    const double tn = g.t(n);
    for (int i = y_index + 1; i < ytilde; ++i) {
      const double u = path.u(n, i);
      const double x = g.x(i);
      const double a = 1.0 + dt * cfg.coeffs.f.deriv(x, tn, u) +
                       cfg.coeffs.sigma.deriv(x, tn, u) * solver.noise_scale() * noise.xi(n, i);
      w[i] *= a;
    }
    sub_tri.solve_in_place(std::span<double>(w).subspan(y_index + 1, n_sub));
    for (int i = y_index + 1; i < ytilde; ++i) loc.w(n + 1, i) = w[i];
  }
  return loc;
}

StoppingInfo stopping_time(const SolutionPath& path, const WallPair& walls, int y_index,
                           int s_index, int x0_index, double a, double b) {
  const Grid& g = path.grid;
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("stopping_time: a, b must be > 0");
  if (y_index < 0 || x0_index <= y_index || x0_index >= g.nx)
    throw std::invalid_argument("stopping_time: need 0 <= y < x0 < 1 on the grid");
  if (s_index < 0 || s_index > g.nt) throw std::invalid_argument("stopping_time: s out of range");
  const int ytilde = std::min(2 * x0_index - y_index, g.nx);

  StoppingInfo info;
  info.s_index = s_index;
  info.tau = std::numeric_limits<double>::infinity();
  bool stopped = false;
  for (int n = s_index; n <= g.nt; ++n) {
    const double t = g.t(n);
    double lo = std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (int i = y_index; i <= ytilde; ++i) {
      const double u = path.u(n, i);
      const double x = g.x(i);
      lo = std::min(lo, u - walls.lower.value(x, t));
      hi = std::min(hi, walls.upper.value(x, t) - u);
    }
    info.lower_margin.push_back(lo);
    info.upper_margin.push_back(hi);
    if (!stopped && (lo <= 0.5 * a || hi <= 0.5 * b)) {
      info.tau = t;
      stopped = true;
    }
  }
  info.in_band = info.lower_margin.front() > 0.5 * a && info.upper_margin.front() > 0.5 * b;
  return info;
}

LowerBoundResult variation_lower_bound(const Solver& solver, const SolutionPath& path,
                                       const NoiseField& noise, int y_index, int s_index,
                                       int x0_index, int t0_index, double a, double b,
                                       double tolerance) {
  const Grid& g = solver.grid();
  if (t0_index <= s_index || t0_index > g.nt)
    throw std::invalid_argument("variation_lower_bound: need s < t0 <= T on the grid");

  const StoppingInfo stop =
      stopping_time(path, solver.config().walls, y_index, s_index, x0_index, a, b);
  const LocalizedVariation loc = localized_variation(solver, path, noise, y_index, s_index,
                                                     x0_index);

  LowerBoundResult out;
  out.tau = stop.tau;
  out.in_band = stop.in_band;
  out.w_at_obs = loc.w(t0_index, x0_index);
  for (double v : loc.w.data()) out.w_max_abs = std::max(out.w_max_abs, std::abs(v));

  const int j_lo = std::max(y_index, 1);
  const int j_hi = std::min(loc.ytilde_index, g.nx - 1);
  double v = 0.0;
  for (int j = j_lo; j <= j_hi; ++j)
    v += variation_value_at(solver, path, noise, {j, s_index}, x0_index, t0_index);
  out.v = v * g.dx();

  const double t0 = g.t(t0_index);
  out.bound = stop.tau > t0 ? out.w_at_obs : 0.0;
  out.holds = out.v >= out.bound - tolerance;
  return out;
}

double variation_norm_sq(const Solver& solver, const SolutionPath& path, const NoiseField& noise,
                         int x0_index, int t0_index, int stride) {
  const Grid& g = solver.grid();
  if (stride < 1) throw std::invalid_argument("variation_norm_sq: stride must be >= 1");
  if (x0_index < 1 || x0_index > g.nx - 1 || t0_index < 1 || t0_index > g.nt)
    throw std::invalid_argument("variation_norm_sq: observation node out of range");

  const double cell = g.dx() * g.dt();
  const double correction = static_cast<double>(stride) * static_cast<double>(stride);
  double total = 0.0;
  for (int m = 0; m < t0_index; m += stride) {
    for (int j = 1; j <= g.nx - 1; j += stride) {
      const double d = variation_value_at(solver, path, noise, {j, m}, x0_index, t0_index);
      total += d * d;
    }
  }
  return total * cell * correction;
}

}  // namespace respde
