#include "respde/penalty.hpp"

#include <cmath>
#include <stdexcept>

namespace respde {

PenaltyForces penalty_forces(double u, double h1, double h2, double epsilon, double delta,
                             PenaltyKind kind) {
  PenaltyForces f;
  if (kind == PenaltyKind::Hard) {
    if (u < h1) f.up = (h1 - u) / delta;
    if (u > h2) f.down = (u - h2) / epsilon;
  } else {
    if (u < h1) {
      const double q = u - h1;
      f.up = std::atan(q * q) / delta;
    }
    if (u > h2) {
      const double r = h2 - u;
      f.down = std::atan(r * r) / epsilon;
    }
  }
  return f;
}

double penalty_up_derivative(double u, double h1, double delta, PenaltyKind kind) {
  if (kind == PenaltyKind::Hard) return u <= h1 ? -1.0 / delta : 0.0;
  if (u >= h1) return 0.0;
  const double q = u - h1;  // q < 0
  return 2.0 * q / ((1.0 + q * q * q * q) * delta);
}

double penalty_down_derivative(double u, double h2, double epsilon, PenaltyKind kind) {
  if (kind == PenaltyKind::Hard) return u >= h2 ? 1.0 / epsilon : 0.0;
  if (u <= h2) return 0.0;
  const double r = h2 - u;  // r < 0
  return -2.0 * r / ((1.0 + r * r * r * r) * epsilon);
}

double implicit_penalty_solve(double rhs, double h1, double h2, double epsilon, double delta,
                              double dt, PenaltyKind kind) {
  // Both forces vanish inside the band; return the input bit-exactly so that
  // inactive walls cannot perturb the trajectory.
  if (rhs >= h1 && rhs <= h2) return rhs;

  if (kind == PenaltyKind::Hard) {
    // Below the band: u*(1 + dt/delta) = rhs + (dt/delta)*h1, and the result
    // stays below h1 exactly when rhs does. Analogous above the band.
    if (rhs < h1) {
      const double w = dt / delta;
      return (rhs + w * h1) / (1.0 + w);
    }
    const double w = dt / epsilon;
    return (rhs + w * h2) / (1.0 + w);
  }

  // Smooth: the root of g(u) = u - dt*(up - down) - rhs lies strictly between
  // rhs and the violated wall, and g' >= 1 everywhere.
  double lo, hi;
  if (rhs < h1) { lo = rhs; hi = h1; } else { lo = h2; hi = rhs; }
  const double tol = 1e-12 * std::fmax(1.0, std::abs(rhs));
  double u = 0.5 * (lo + hi);
  for (int iter = 0; iter < 100; ++iter) {
    const PenaltyForces f = penalty_forces(u, h1, h2, epsilon, delta, PenaltyKind::Smooth);
    const double g = u - dt * (f.up - f.down) - rhs;
    if (std::abs(g) <= tol) return u;
    if (g > 0.0) hi = u; else lo = u;
    const double gp = 1.0 - dt * (penalty_up_derivative(u, h1, delta, PenaltyKind::Smooth) -
                                  penalty_down_derivative(u, h2, epsilon, PenaltyKind::Smooth));
    const double candidate = u - g / gp;
    u = (candidate > lo && candidate < hi) ? candidate : 0.5 * (lo + hi);
  }
  throw std::runtime_error("implicit_penalty_solve: no convergence in 100 iterations");
}

}  // namespace respde
