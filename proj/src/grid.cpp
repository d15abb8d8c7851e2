#include "respde/grid.hpp"

#include <stdexcept>
#include <string>

namespace respde {

Grid make_grid(int nx, int nt, double T) {
  if (nx < 4) throw std::invalid_argument("grid: nx must be >= 4, got " + std::to_string(nx));
  if (nt < 4) throw std::invalid_argument("grid: nt must be >= 4, got " + std::to_string(nt));
  if (!(T > 0.0)) throw std::invalid_argument("grid: T must be > 0, got " + std::to_string(T));
  return Grid{nx, nt, T};
}

}  // namespace respde
