#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "respde/solver.hpp"

namespace respde {

// Monte Carlo study of the law of u(x0, t0) over independent noise
// realisations. Path p uses the seed derive_seed(base_seed, p), so the
// ensemble is reproducible and order-independent.
struct EnsembleConfig {
  SolverConfig solver;
  int n_paths = 0;             // >= 100
  std::uint64_t base_seed = 0;
  int x0_index = 0;            // interior: 1..nx-1
  int t0_index = 0;            // 1..nt
  double a = 0.0;              // interior margins, > 0
  double b = 0.0;
};

struct SampleSet {
  std::vector<double> values;        // u(x0, t0) per path
  std::vector<std::uint8_t> in_event;  // margin event per path
  double h1_obs = 0.0;               // walls at the observation node
  double h2_obs = 0.0;
  double a = 0.0;
  double b = 0.0;
  std::uint64_t base_seed = 0;
};

// Runs the ensemble on `threads` workers (results identical for any count).
// A failing path aborts the whole run with its seed in the error message.
SampleSet run_ensemble(const EnsembleConfig& config, int threads = 1);

// True iff the sample keeps both margins: u - h1 >= a and h2 - u >= b.
bool detect_event(double value, double h1_obs, double h2_obs, double a, double b);

// Gaussian kernel density estimate evaluated on n_points evenly spaced
// points spanning the interior interval [h1+a, h2-b].
struct DensityEstimate {
  std::vector<double> points;
  std::vector<double> density;
  double bandwidth = 0.0;
  double integral = 0.0;  // exact mass of the estimate over [min-8h, max+8h]
};

// bandwidth <= 0 selects Silverman's rule 1.06 * sd * N^(-1/5). Requires at
// least 100 samples with nonzero spread: constant samples indicate an atom,
// for which the estimate is meaningless (the error message points to
// atom_diagnostic).
DensityEstimate kde(const SampleSet& samples, double bandwidth = 0.0, int n_points = 201);

// Maximum fraction of samples contained in any closed interval of the given
// width, for each width. Widths must be positive and strictly decreasing.
// Near-1 mass at small widths signals an atom in the sampled law.
std::vector<double> atom_diagnostic(std::span<const double> values,
                                    std::span<const double> widths);

}  // namespace respde
