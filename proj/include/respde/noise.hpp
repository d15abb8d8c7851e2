#pragma once

#include <cstdint>

#include "respde/grid.hpp"
#include "respde/matrix.hpp"

namespace respde {

// Discretised space-time white noise: one i.i.d. N(0,1) draw per interior
// cell (i = 1..nx-1, n = 0..nt-1). The driving sheet increment of cell (i,n)
// is xi(n,i) * sqrt(dx*dt); the forcing applied per step is
// xi(n,i) * sqrt(dt)/sqrt(dx).
struct NoiseField {
  std::uint64_t seed = 0;
  int nx = 0;
  int nt = 0;
  Matrix xi;  // rows n = 0..nt-1, cols i = 0..nx (boundary columns stay 0)

  double value(int i, int n) const { return xi(n, i); }
};

// Fills the field from the counter-based generator keyed by seed, with the
// cell's linear index as counter. Bit-identical for equal (grid, seed)
// regardless of evaluation order or thread count.
NoiseField sample_noise(const Grid& grid, std::uint64_t seed);

}  // namespace respde
