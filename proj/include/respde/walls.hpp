#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "respde/grid.hpp"
#include "respde/matrix.hpp"

namespace respde {

// --- wall catalog ----------------------------------------------------------

enum class WallKind { Constant, AffineT, SineX };

// Closed-form wall profile. Meaning of (a, b) by kind:
//   Constant: h(x,t) = a
//   AffineT:  h(x,t) = a + b*t
//   SineX:    h(x,t) = a + b*sin(pi*x)
// All kinds carry exact time and second-space derivatives, so the structural
// checks below never rely on finite differences.
struct WallSpec {
  WallKind kind = WallKind::Constant;
  double a = 0.0;
  double b = 0.0;

  static WallSpec constant(double level) { return {WallKind::Constant, level, 0.0}; }
  static WallSpec affine_t(double level, double slope) { return {WallKind::AffineT, level, slope}; }
  static WallSpec sine_x(double offset, double amplitude) { return {WallKind::SineX, offset, amplitude}; }

  double value(double x, double t) const;
  double dt(double x, double t) const;   // time derivative
  double dxx(double x, double t) const;  // second space derivative
};

struct WallPair {
  WallSpec lower;  // h1
  WallSpec upper;  // h2
};

// Wall values cached on the lattice: rows n = 0..nt, cols i = 0..nx.
Matrix wall_lattice(const WallSpec& wall, const Grid& grid);

// --- coefficient catalog ----------------------------------------------------

enum class CoeffKind { Zero, Constant, Linear, Sine };

// Closed-form drift/dispersion rule in the state variable. The catalog rules
// ignore (x, t); the signature keeps them so the stepping code can pass the
// evaluation point uniformly. Meaning of (a, b, c) by kind:
//   Zero:     g(u) = 0
//   Constant: g(u) = a
//   Linear:   g(u) = a + b*u
//   Sine:     g(u) = a + b*sin(c*u)
struct CoeffRule {
  CoeffKind kind = CoeffKind::Zero;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  static CoeffRule zero() { return {CoeffKind::Zero, 0.0, 0.0, 0.0}; }
  static CoeffRule constant(double value) { return {CoeffKind::Constant, value, 0.0, 0.0}; }
  static CoeffRule linear(double intercept, double slope) { return {CoeffKind::Linear, intercept, slope, 0.0}; }
  static CoeffRule sine(double offset, double amplitude, double frequency) {
    return {CoeffKind::Sine, offset, amplitude, frequency};
  }

  double value(double x, double t, double u) const;
  double deriv(double x, double t, double u) const;  // exact d/du
};

struct CoefficientSet {
  CoeffRule f;               // drift
  CoeffRule sigma;           // dispersion
  double lipschitz = 0.0;    // declared bound on |f'| and |sigma'|
  double sigma_bound = 0.0;  // declared bound on |sigma|
  double sigma_min = 0.0;    // declared positivity floor (0 = no claim)
};

// --- structural checks ------------------------------------------------------

enum class CheckStatus { Pass, Fail, NotChecked };

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::NotChecked;
  double margin = 0.0;  // signed; negative means violated by that amount
  int node_i = -1;      // worst offending lattice node (space)
  int node_n = -1;      // worst offending lattice node (time)
  std::string note;
};

struct HypothesisReport {
  std::vector<CheckResult> checks;

  const CheckResult* find(std::string_view name) const;
  bool passed(std::string_view name) const;  // true also when NotChecked
  bool failed(std::string_view name) const;
  // Hard requirements for running a simulation. "H3" stays advisory: walls
  // moving at the ends are flagged but not forbidden.
  bool required_pass() const;
  std::string summary() const;

  void merge(const HypothesisReport& other);
};

// Lattice checks on a wall pair:
//   H1            strict ordering h1 < h2 at interior nodes, all times
//   H2            integrability of dt h + dxx h (closed-form kinds: finite values)
//   H3            |dt h| at x = 0, 1 within 1e-12 (advisory)
//   H4            forward time differences of (h2 - h1) >= -1e-12
//   boundary_sign h1 <= 0 and h2 >= 0 at x = 0, 1 for every grid time
HypothesisReport validate_walls(const WallPair& walls, const Grid& grid);

// Ladder checks on the closed-form coefficient rules over [u_lo, u_hi]
// (1024 evenly spaced samples, endpoints included):
//   F               |sigma| <= sigma_bound, |f'| <= lipschitz, |sigma'| <= lipschitz
//   sigma_positivity  sigma >= sigma_min when sigma_min > 0 (else NotChecked)
HypothesisReport validate_coefficients(const CoefficientSet& coeffs, double u_lo, double u_hi);

}  // namespace respde
