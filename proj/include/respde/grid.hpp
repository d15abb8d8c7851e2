#pragma once

namespace respde {

// Uniform space-time lattice on [0,1] x [0,T].
//
// Nodes are x_i = i/nx (i = 0..nx) and t_n = T*(n/nt) (n = 0..nt), so the
// endpoints evaluate exactly to 0, 1 and 0, T in floating point. Noise and
// the reflection measures live on the nt x (nx-1) interior cells.
struct Grid {
  int nx = 0;
  int nt = 0;
  double T = 0.0;

  double dx() const { return 1.0 / nx; }
  double dt() const { return T / nt; }
  double x(int i) const { return static_cast<double>(i) / nx; }
  double t(int n) const { return T * (static_cast<double>(n) / nt); }
};

// Throws std::invalid_argument unless nx >= 4, nt >= 4 and T > 0.
Grid make_grid(int nx, int nt, double T);

}  // namespace respde
