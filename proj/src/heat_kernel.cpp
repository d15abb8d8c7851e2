#include "respde/heat_kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace respde {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTermFloor = 1e-16;
}  // namespace

double heat_kernel(double x, double y, double t, const KernelSpec& spec) {
  if (!(spec.right > spec.left)) throw std::invalid_argument("heat_kernel: right <= left");
  if (spec.n_terms < 1) throw std::invalid_argument("heat_kernel: n_terms < 1");
  if (!(t > 0.0)) throw std::invalid_argument("heat_kernel: t must be > 0");
  if (x < spec.left || x > spec.right || y < spec.left || y > spec.right)
    throw std::invalid_argument("heat_kernel: x, y must lie in [left, right]");

  // Exactly zero on the boundary; the series would only get there up to
  // the rounding of sin(k*pi).
  if (x == spec.left || x == spec.right || y == spec.left || y == spec.right) return 0.0;

  const double L = spec.right - spec.left;
  const double xs = (x - spec.left) / L;
  const double ys = (y - spec.left) / L;
  const double decay = kPi * kPi * t / (L * L);
  const double amp = 2.0 / L;

  double sum = 0.0;
  for (int k = 1; k <= spec.n_terms; ++k) {
    const double envelope = amp * std::exp(-decay * k * k);
    if (envelope < kTermFloor) break;
    sum += envelope * std::sin(k * kPi * xs) * std::sin(k * kPi * ys);
  }
  // The truncated series can undershoot zero by O(1e-16) for short times.
  return sum > 0.0 ? sum : 0.0;
}

}  // namespace respde
