#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "respde/grid.hpp"
#include "respde/matrix.hpp"
#include "respde/noise.hpp"
#include "respde/penalty.hpp"
#include "respde/walls.hpp"

namespace respde {

// Factorised Thomas solve for (I + r*tridiag(-1, 2, -1)) on n interior
// unknowns with zero Dirichlet ends. The matrix is strictly diagonally
// dominant, so the elimination never needs pivoting; the factorisation is
// still guarded against degenerate pivots.
class TridiagSolver {
 public:
  TridiagSolver() = default;
  TridiagSolver(int n_unknowns, double r);

  // Overwrites d (length n_unknowns) with the solution.
  void solve_in_place(std::span<double> d) const;
  int size() const { return static_cast<int>(upper_.size()); }

 private:
  std::vector<double> upper_;     // eliminated upper-diagonal coefficients
  std::vector<double> inv_diag_;  // reciprocals of the eliminated pivots
  double off_ = 0.0;              // off-diagonal value (-r)
};

// Initial profiles vanish at both ends of [0,1]:
//   Zero: u0 = 0
//   Sine: u0 = amplitude * sin(mode*pi*x)
struct InitialProfile {
  enum class Kind { Zero, Sine };
  Kind kind = Kind::Zero;
  double amplitude = 0.0;
  int mode = 1;

  static InitialProfile zero() { return {}; }
  static InitialProfile sine(double amplitude, int mode = 1) {
    return {Kind::Sine, amplitude, mode};
  }

  double value(double x) const;
};

struct SolverConfig {
  Grid grid;
  WallPair walls;
  CoefficientSet coeffs;
  InitialProfile initial;
  double epsilon = 0.1;
  double delta = 0.1;
  PenaltyKind penalty = PenaltyKind::Hard;
};

// One trajectory of the penalised scheme. u has rows n = 0..nt; eta and xi
// are the nonnegative reflection-measure increments of each step, rows
// n = 0..nt-1, already carrying the cell mass dx*dt. Boundary columns of all
// three stay exactly zero.
struct SolutionPath {
  std::uint64_t seed = 0;
  Grid grid;
  Matrix u;
  Matrix eta;  // lower-wall increments
  Matrix xi;   // upper-wall increments
};

// Time stepping by operator splitting, one step per noise row:
//   (a) explicit drift + noise  w = u + dt*f(x,t,u) + sigma(x,t,u)*xi*sqrt(dt/dx)
//   (b) implicit diffusion      (I + dt*A_h) w' = w      (A_h = 3-point Laplacian)
//   (c) implicit penalty        u' = w' + dt*(up(u') - down(u'))  per node
// Walls are evaluated at the post-step time in (c); the reflection increments
// read the forces at the accepted state u'.
class Solver {
 public:
  // Validates the configuration: grid bounds, positive epsilon/delta, wall
  // hypotheses (H1, H4, boundary signs; H3 only flagged), coefficient bounds
  // on the wall band, and the initial profile confined to the band at t = 0
  // (violations up to 1e-12 are clipped, larger ones throw).
  explicit Solver(SolverConfig cfg);

  const SolverConfig& config() const { return cfg_; }
  const Grid& grid() const { return cfg_.grid; }
  const HypothesisReport& validation() const { return validation_; }
  bool initial_was_clipped() const { return initial_clipped_; }

  double wall_lower(int n, int i) const { return h1_(n, i); }
  double wall_upper(int n, int i) const { return h2_(n, i); }
  double noise_scale() const { return noise_scale_; }
  const TridiagSolver& diffusion() const { return tri_; }
  const std::vector<double>& initial_values() const { return u0_; }

  SolutionPath solve(const NoiseField& noise) const;

  // Single step n -> n+1 (exposed for tests). Spans must have nx+1 entries;
  // eta_out/xi_out receive the measure increments of this step.
  void step(int n, std::span<const double> u_in, std::span<const double> noise_row,
            std::span<double> u_out, std::span<double> eta_out, std::span<double> xi_out) const;

 private:
  void step_impl(int n, std::span<const double> u_in, std::span<const double> noise_row,
                 std::span<double> u_out, std::span<double> eta_out, std::span<double> xi_out,
                 std::vector<double>& scratch) const;

  SolverConfig cfg_;
  Matrix h1_, h2_;  // wall lattices
  TridiagSolver tri_;
  std::vector<double> u0_;
  double noise_scale_ = 0.0;
  HypothesisReport validation_;
  bool initial_clipped_ = false;
};

// Discrete complementarity integrals
//   lower = sum (u - h1) * eta,  upper = sum (h2 - u) * xi
// with u and the walls read at the post-step state of each increment.
std::pair<double, double> complementarity(const SolutionPath& path, const WallPair& walls);

// Nested-limit convergence study on one noise realisation: for each epsilon
// (outer, decreasing) all deltas are run (inner, decreasing) and sup-norm
// differences between consecutive solutions recorded; the inner limit is
// proxied by the smallest delta.
struct SweepEntry {
  double epsilon = 0.0;
  double delta = 0.0;
  double inner_diff = 0.0;  // sup|u - previous-delta u|; NaN for the first delta
  double max_lower_violation = 0.0;  // max (h1 - u)^+
  double max_upper_violation = 0.0;  // max (u - h2)^+
};

struct SweepOuterEntry {
  double eps_coarse = 0.0;
  double eps_fine = 0.0;
  double outer_diff = 0.0;    // sup-norm between the two inner-limit proxies
  double ordering_min = 0.0;  // min over the lattice of (u_coarse - u_fine)
};

struct SweepTable {
  std::vector<SweepEntry> entries;
  std::vector<SweepOuterEntry> outer;
};

// Requires both lists nonempty and strictly decreasing. The same NoiseField
// (from `seed`) drives every run.
SweepTable sweep(const SolverConfig& base, std::span<const double> epsilons,
                 std::span<const double> deltas, std::uint64_t seed);

}  // namespace respde
