#include "respde/noise.hpp"

#include "respde/rng.hpp"

namespace respde {

NoiseField sample_noise(const Grid& grid, std::uint64_t seed) {
  NoiseField field;
  field.seed = seed;
  field.nx = grid.nx;
  field.nt = grid.nt;
  field.xi = Matrix(static_cast<std::size_t>(grid.nt), static_cast<std::size_t>(grid.nx) + 1);
  const std::uint64_t stride = static_cast<std::uint64_t>(grid.nx) + 1;
  for (int n = 0; n < grid.nt; ++n) {
    const std::uint64_t row_base = static_cast<std::uint64_t>(n) * stride;
    for (int i = 1; i < grid.nx; ++i) {
      field.xi(n, i) = normal_from_counter(seed, row_base + static_cast<std::uint64_t>(i));
    }
  }
  return field;
}

}  // namespace respde
