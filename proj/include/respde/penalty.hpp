#pragma once

namespace respde {

// Two-sided penalisation of the wall constraints. "up" pushes the state back
// above the lower wall, "down" pushes it back below the upper wall; both are
// nonnegative and vanish identically inside the band [h1, h2].
enum class PenaltyKind { Hard, Smooth };

struct PenaltyForces {
  double up = 0.0;
  double down = 0.0;
};

// Hard:   up = (u - h1)^- / delta,            down = (u - h2)^+ / epsilon
// Smooth: up = atan(((u-h1) ^ 0)^2) / delta,  down = atan(((h2-u) ^ 0)^2) / epsilon
// where (q)^- = max(-q, 0) and (q ^ 0) = min(q, 0).
// Requires epsilon > 0, delta > 0 and h1 < h2 (unchecked here; the solver
// validates its walls once).
PenaltyForces penalty_forces(double u, double h1, double h2, double epsilon, double delta,
                             PenaltyKind kind);

// d(up)/du, always <= 0. At the Hard kink u == h1 the one-sided derivative
// from the violating side (-1/delta) is used.
double penalty_up_derivative(double u, double h1, double delta, PenaltyKind kind);

// d(down)/du, always >= 0. At the Hard kink u == h2 the one-sided derivative
// from the violating side (+1/epsilon) is used.
double penalty_down_derivative(double u, double h2, double epsilon, PenaltyKind kind);

// Solves the per-node implicit relation
//   u = rhs + dt * (up(u) - down(u))
// whose left-minus-right side is strictly increasing in u. Returns rhs
// unchanged (bit-exact) when rhs already lies in [h1, h2]. Hard penalties
// have a closed form; Smooth ones use Newton safeguarded by bisection with
// tolerance 1e-12 * max(1, |rhs|) and at most 100 iterations, after which a
// std::runtime_error is thrown.
double implicit_penalty_solve(double rhs, double h1, double h2, double epsilon, double delta,
                              double dt, PenaltyKind kind);

}  // namespace respde
