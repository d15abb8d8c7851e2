#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "respde/matrix.hpp"
#include "respde/noise.hpp"
#include "respde/solver.hpp"

namespace respde {

// Source cell (j, m): the derivative is taken with respect to the driving
// sheet increment dW = xi(m, j) * sqrt(dx*dt) consumed by step m -> m+1.
struct SourceCell {
  int j = 0;
  int m = 0;
};

// First-variation field D(n, i) = d u(n, i) / d dW_{j,m}, obtained by
// differentiating the splitting scheme along the stored trajectory:
//   seed   D*_j = sigma(x_j, t_m, u(m,j)) / dx at step m,
//   then per step: explicit factor  1 + dt*f' + sigma' * xi * sqrt(dt/dx),
//                  the same implicit diffusion solve,
//                  penalty factor   1 / (1 - dt*(up' - down')) at the accepted state.
// Rows n <= m are exactly zero.
struct FirstVariationField {
  SourceCell source;
  std::uint64_t seed = 0;
  Matrix D;
  // Hard-penalty cells whose accepted state sits within 1e-12 of a wall: the
  // one-sided derivative convention was applied there.
  std::vector<std::pair<int, int>> kink_cells;  // (i, n)
};

FirstVariationField first_variation(const Solver& solver, const SolutionPath& path,
                                    const NoiseField& noise, SourceCell source);

// S = D / sigma(x_j, t_m, u(m,j)). Requires a declared sigma_min > 0.
FirstVariationField factorized_variation(const Solver& solver, const SolutionPath& path,
                                         const FirstVariationField& d);

// Dominating field: the same recursion seeded with 1/dx at the source but
// with every penalty factor dropped (drift and dispersion linearisations are
// kept). Coincides with S whenever the penalties never activate.
FirstVariationField dominating_variation(const Solver& solver, const SolutionPath& path,
                                         const NoiseField& noise, SourceCell source);

// Localised linearised field w on the subinterval [y, ytilde], where
// ytilde = min(2*x0 - y, 1) snapped to the grid (pure index arithmetic).
// w is seeded at time s with sigma(u(s, .)) on the open subinterval, zero at
// the subinterval ends, and evolves by the same splitting with coefficients
// f'(u), sigma'(u) frozen along the base trajectory and no penalty terms.
struct LocalizedVariation {
  int y_index = 0;
  int s_index = 0;
  int x0_index = 0;
  int ytilde_index = 0;
  Matrix w;  // full-width rows n = 0..nt; zero outside [y, ytilde] and for n < s
};

// Requires 0 <= y < x0 < ytilde (indices) and a subinterval of at least 4 cells.
LocalizedVariation localized_variation(const Solver& solver, const SolutionPath& path,
                                       const NoiseField& noise, int y_index, int s_index,
                                       int x0_index);

// Margin scan over the subinterval [y, ytilde]:
//   lower_margin(n) = min_z (u - h1),  upper_margin(n) = min_z (h2 - u),
// recorded for n = s..nt. in_band holds when both margins strictly exceed
// a/2 and b/2 at time s; tau is the first grid time >= s at which either
// margin drops to its threshold or below (+infinity when that never happens).
struct StoppingInfo {
  double tau = 0.0;
  bool in_band = false;
  int s_index = 0;
  std::vector<double> lower_margin;
  std::vector<double> upper_margin;
};

StoppingInfo stopping_time(const SolutionPath& path, const WallPair& walls, int y_index,
                           int s_index, int x0_index, double a, double b);

// Integrated lower bound at the observation node (x0, t0):
//   v     = sum over sources z in [y, ytilde] of D_{z,s} u(x0, t0) * dx
//   bound = w(x0, t0) * 1{tau > t0}
//   holds = v >= bound - tolerance.
struct LowerBoundResult {
  double v = 0.0;
  double bound = 0.0;
  double w_at_obs = 0.0;
  double w_max_abs = 0.0;
  double tau = 0.0;
  bool in_band = false;
  bool holds = false;
};

LowerBoundResult variation_lower_bound(const Solver& solver, const SolutionPath& path,
                                       const NoiseField& noise, int y_index, int s_index,
                                       int x0_index, int t0_index, double a, double b,
                                       double tolerance);

// Strided approximation of the squared variation norm at (x0, t0):
//   sum over sampled sources (j, m) of D_{j,m} u(x0,t0)^2 * dx * dt * stride^2,
// sampling j in {1, 1+stride, ...} and m in {0, stride, ...}, m < t0.
double variation_norm_sq(const Solver& solver, const SolutionPath& path, const NoiseField& noise,
                         int x0_index, int t0_index, int stride);

// Value D_{j,m} u(x0, t0) without materialising the full field.
double variation_value_at(const Solver& solver, const SolutionPath& path, const NoiseField& noise,
                          SourceCell source, int x0_index, int t0_index);

}  // namespace respde
