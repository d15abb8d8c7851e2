#pragma once

namespace respde {

// Dirichlet heat kernel on the interval (left, right), evaluated by sine
// series truncated at n_terms with early exit once the term envelope drops
// below 1e-16.
struct KernelSpec {
  double left = 0.0;
  double right = 1.0;
  int n_terms = 200;
};

// G_t(x, y) for the half Laplacian-free normalisation d/dt = d2/dx2:
//   G_t(x,y) = (2/L) * sum_k exp(-(k pi / L)^2 t) sin(k pi (x-l)/L) sin(k pi (y-l)/L).
// Symmetric in (x, y), zero at the endpoints, mass <= 1.
// Throws std::invalid_argument for t <= 0, malformed spec, or x,y outside [l,r].
double heat_kernel(double x, double y, double t, const KernelSpec& spec = {});

}  // namespace respde
