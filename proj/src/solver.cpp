#include "respde/solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace respde {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

TridiagSolver::TridiagSolver(int n_unknowns, double r) : off_(-r) {
  if (n_unknowns < 1) throw std::invalid_argument("TridiagSolver: need at least one unknown");
  const double diag = 1.0 + 2.0 * r;
  upper_.resize(n_unknowns);
  inv_diag_.resize(n_unknowns);
  double pivot = diag;
  for (int k = 0; k < n_unknowns; ++k) {
    if (!(std::abs(pivot) > 0.0)) throw std::runtime_error("TridiagSolver: degenerate pivot");
    inv_diag_[k] = 1.0 / pivot;
    upper_[k] = off_ * inv_diag_[k];
    pivot = diag - off_ * upper_[k];
  }
}

void TridiagSolver::solve_in_place(std::span<double> d) const {
  const int n = size();
  d[0] *= inv_diag_[0];
  for (int k = 1; k < n; ++k) d[k] = (d[k] - off_ * d[k - 1]) * inv_diag_[k];
  for (int k = n - 2; k >= 0; --k) d[k] -= upper_[k] * d[k + 1];
}

double InitialProfile::value(double x) const {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::Sine: return amplitude * std::sin(mode * kPi * x);
  }
  return 0.0;
}

Solver::Solver(SolverConfig cfg) : cfg_(std::move(cfg)) {
  const Grid& g = cfg_.grid;
  make_grid(g.nx, g.nt, g.T);  // re-validates bounds
  if (!(cfg_.epsilon > 0.0) || !(cfg_.delta > 0.0))
    throw std::invalid_argument("solver: epsilon and delta must be > 0");
  if (cfg_.initial.kind == InitialProfile::Kind::Sine && cfg_.initial.mode < 1)
    throw std::invalid_argument("solver: initial sine mode must be >= 1");

  h1_ = wall_lattice(cfg_.walls.lower, g);
  h2_ = wall_lattice(cfg_.walls.upper, g);
  noise_scale_ = std::sqrt(g.dt() / g.dx());
  tri_ = TridiagSolver(g.nx - 1, g.dt() / (g.dx() * g.dx()));

  validation_ = validate_walls(cfg_.walls, g);
  double band_lo = std::numeric_limits<double>::infinity();
  double band_hi = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < h1_.data().size(); ++k) {
    band_lo = std::min(band_lo, h1_.data()[k]);
    band_hi = std::max(band_hi, h2_.data()[k]);
  }
  validation_.merge(validate_coefficients(cfg_.coeffs, band_lo, band_hi));
  if (!validation_.required_pass()) {
    throw std::invalid_argument("solver: structural checks failed\n" + validation_.summary());
  }

  // Initial profile, confined to the band at t = 0. Violations within 1e-12
  // are clipped (recorded); anything larger is a configuration error.
  u0_.assign(g.nx + 1, 0.0);
  for (int i = 1; i < g.nx; ++i) {
    double v = cfg_.initial.value(g.x(i));
    const double lo = h1_(0, i), hi = h2_(0, i);
    if (v < lo || v > hi) {
      const double overshoot = v < lo ? lo - v : v - hi;
      if (overshoot > 1e-12) {
        std::ostringstream msg;
        msg << "solver: initial profile violates the band by " << overshoot << " at x = "
            << g.x(i);
        throw std::invalid_argument(msg.str());
      }
      v = v < lo ? lo : hi;
      initial_clipped_ = true;
    }
    u0_[i] = v;
  }
}

void Solver::step_impl(int n, std::span<const double> u_in, std::span<const double> noise_row,
                       std::span<double> u_out, std::span<double> eta_out,
                       std::span<double> xi_out, std::vector<double>& scratch) const {
  const Grid& g = cfg_.grid;
  const int nx = g.nx;
  const double dt = g.dt();
  const double cell = g.dx() * dt;
  const double tn = g.t(n);

  scratch.resize(nx + 1);
  // (a) explicit drift + noise
  for (int i = 1; i < nx; ++i) {
    const double x = g.x(i);
    const double u = u_in[i];
    scratch[i] = u + dt * cfg_.coeffs.f.value(x, tn, u) +
                 cfg_.coeffs.sigma.value(x, tn, u) * noise_scale_ * noise_row[i];
  }
  // (b) implicit diffusion on the interior block
  tri_.solve_in_place(std::span<double>(scratch).subspan(1, nx - 1));
  // (c) implicit penalty, walls at the post-step time
  u_out[0] = 0.0;
  u_out[nx] = 0.0;
  eta_out[0] = eta_out[nx] = 0.0;
  xi_out[0] = xi_out[nx] = 0.0;
  for (int i = 1; i < nx; ++i) {
    const double lo = h1_(n + 1, i), hi = h2_(n + 1, i);
    const double u1 = implicit_penalty_solve(scratch[i], lo, hi, cfg_.epsilon, cfg_.delta, dt,
                                             cfg_.penalty);
    const PenaltyForces f = penalty_forces(u1, lo, hi, cfg_.epsilon, cfg_.delta, cfg_.penalty);
    u_out[i] = u1;
    eta_out[i] = f.up * cell;
    xi_out[i] = f.down * cell;
  }
}

void Solver::step(int n, std::span<const double> u_in, std::span<const double> noise_row,
                  std::span<double> u_out, std::span<double> eta_out,
                  std::span<double> xi_out) const {
  if (n < 0 || n >= cfg_.grid.nt) throw std::invalid_argument("step: time index out of range");
  std::vector<double> scratch;
  step_impl(n, u_in, noise_row, u_out, eta_out, xi_out, scratch);
}

SolutionPath Solver::solve(const NoiseField& noise) const {
  const Grid& g = cfg_.grid;
  if (noise.nx != g.nx || noise.nt != g.nt)
    throw std::invalid_argument("solve: noise field dimensions do not match the grid");

  SolutionPath path;
  path.seed = noise.seed;
  path.grid = g;
  path.u = Matrix(g.nt + 1, g.nx + 1);
  path.eta = Matrix(g.nt, g.nx + 1);
  path.xi = Matrix(g.nt, g.nx + 1);

  for (int i = 0; i <= g.nx; ++i) path.u(0, i) = u0_[i];
  std::vector<double> scratch;
  for (int n = 0; n < g.nt; ++n) {
    step_impl(n, path.u.row(n), noise.xi.row(n), path.u.row(n + 1), path.eta.row(n),
              path.xi.row(n), scratch);
  }
  return path;
}

std::pair<double, double> complementarity(const SolutionPath& path, const WallPair& walls) {
  const Grid& g = path.grid;
  double lower = 0.0, upper = 0.0;
  for (int n = 0; n < g.nt; ++n) {
    const double t1 = g.t(n + 1);
    for (int i = 1; i < g.nx; ++i) {
      const double e = path.eta(n, i);
      const double x = path.xi(n, i);
      if (e != 0.0) lower += (path.u(n + 1, i) - walls.lower.value(g.x(i), t1)) * e;
      if (x != 0.0) upper += (walls.upper.value(g.x(i), t1) - path.u(n + 1, i)) * x;
    }
  }
  return {lower, upper};
}

namespace {

bool strictly_decreasing(std::span<const double> v) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] < v[k - 1])) return false;
  return true;
}

}  // namespace

SweepTable sweep(const SolverConfig& base, std::span<const double> epsilons,
                 std::span<const double> deltas, std::uint64_t seed) {
  if (epsilons.empty() || deltas.empty())
    throw std::invalid_argument("sweep: epsilon and delta lists must be nonempty");
  if (!strictly_decreasing(epsilons) || !strictly_decreasing(deltas))
    throw std::invalid_argument("sweep: epsilon and delta lists must be strictly decreasing");

  const NoiseField noise = sample_noise(base.grid, seed);

  SweepTable table;
  Matrix prev_proxy;
  double prev_eps = 0.0;
  for (double eps : epsilons) {
    Matrix prev_u;
    Matrix proxy;
    for (double delta : deltas) {
      SolverConfig cfg = base;
      cfg.epsilon = eps;
      cfg.delta = delta;
      const Solver solver(cfg);
      SolutionPath path = solver.solve(noise);

      SweepEntry entry;
      entry.epsilon = eps;
      entry.delta = delta;
      entry.inner_diff = std::numeric_limits<double>::quiet_NaN();
      if (!prev_u.empty()) {
        double diff = 0.0;
        for (std::size_t k = 0; k < path.u.data().size(); ++k)
          diff = std::max(diff, std::abs(path.u.data()[k] - prev_u.data()[k]));
        entry.inner_diff = diff;
      }
      for (int n = 0; n <= base.grid.nt; ++n) {
        for (int i = 0; i <= base.grid.nx; ++i) {
          const double u = path.u(n, i);
          entry.max_lower_violation =
              std::max(entry.max_lower_violation, solver.wall_lower(n, i) - u);
          entry.max_upper_violation =
              std::max(entry.max_upper_violation, u - solver.wall_upper(n, i));
        }
      }
      entry.max_lower_violation = std::max(entry.max_lower_violation, 0.0);
      entry.max_upper_violation = std::max(entry.max_upper_violation, 0.0);
      table.entries.push_back(entry);

      prev_u = path.u;
      proxy = std::move(path.u);
    }
    if (!prev_proxy.empty()) {
      SweepOuterEntry outer;
      outer.eps_coarse = prev_eps;
      outer.eps_fine = eps;
      double diff = 0.0;
      double ordering = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < proxy.data().size(); ++k) {
        const double d = prev_proxy.data()[k] - proxy.data()[k];
        diff = std::max(diff, std::abs(d));
        ordering = std::min(ordering, d);
      }
      outer.outer_diff = diff;
      outer.ordering_min = ordering;
      table.outer.push_back(outer);
    }
    prev_proxy = std::move(proxy);
    prev_eps = eps;
  }
  return table;
}

}  // namespace respde
