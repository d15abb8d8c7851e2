#include "respde/walls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace respde {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTol = 1e-12;
}  // namespace

double WallSpec::value(double x, double t) const {
  switch (kind) {
    case WallKind::Constant: return a;
    case WallKind::AffineT: return a + b * t;
    case WallKind::SineX: return a + b * std::sin(kPi * x);
  }
  return 0.0;
}

double WallSpec::dt(double /*x*/, double /*t*/) const {
  return kind == WallKind::AffineT ? b : 0.0;
}

double WallSpec::dxx(double x, double /*t*/) const {
  return kind == WallKind::SineX ? -b * kPi * kPi * std::sin(kPi * x) : 0.0;
}

Matrix wall_lattice(const WallSpec& wall, const Grid& grid) {
  Matrix m(static_cast<std::size_t>(grid.nt) + 1, static_cast<std::size_t>(grid.nx) + 1);
  for (int n = 0; n <= grid.nt; ++n)
    for (int i = 0; i <= grid.nx; ++i)
      m(n, i) = wall.value(grid.x(i), grid.t(n));
  return m;
}

double CoeffRule::value(double /*x*/, double /*t*/, double u) const {
  switch (kind) {
    case CoeffKind::Zero: return 0.0;
    case CoeffKind::Constant: return a;
    case CoeffKind::Linear: return a + b * u;
    case CoeffKind::Sine: return a + b * std::sin(c * u);
  }
  return 0.0;
}

double CoeffRule::deriv(double /*x*/, double /*t*/, double u) const {
  switch (kind) {
    case CoeffKind::Zero: return 0.0;
    case CoeffKind::Constant: return 0.0;
    case CoeffKind::Linear: return b;
    case CoeffKind::Sine: return b * c * std::cos(c * u);
  }
  return 0.0;
}

const CheckResult* HypothesisReport::find(std::string_view name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

bool HypothesisReport::passed(std::string_view name) const {
  const CheckResult* c = find(name);
  return c == nullptr || c->status != CheckStatus::Fail;
}

bool HypothesisReport::failed(std::string_view name) const { return !passed(name); }

bool HypothesisReport::required_pass() const {
  for (const auto& c : checks) {
    if (c.status == CheckStatus::Fail && c.name != "H3") return false;
  }
  return true;
}

std::string HypothesisReport::summary() const {
  std::ostringstream out;
  for (const auto& c : checks) {
    out << c.name << ": "
        << (c.status == CheckStatus::Pass ? "pass"
            : c.status == CheckStatus::Fail ? "FAIL" : "not checked");
    if (c.status == CheckStatus::Fail) {
      out << " (margin " << c.margin;
      if (c.node_i >= 0) out << " at i=" << c.node_i << ", n=" << c.node_n;
      out << ")";
    }
    out << "\n";
  }
  return out.str();
}

void HypothesisReport::merge(const HypothesisReport& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

namespace {

// Tracks the smallest margin seen and where it occurred.
struct WorstCase {
  double margin = std::numeric_limits<double>::infinity();
  int i = -1, n = -1;
  void update(double m, int i_, int n_) {
    if (m < margin) { margin = m; i = i_; n = n_; }
  }
};

CheckResult make_result(std::string name, const WorstCase& w, double tol, std::string note = {}) {
  CheckResult r;
  r.name = std::move(name);
  r.status = w.margin >= -tol ? CheckStatus::Pass : CheckStatus::Fail;
  r.margin = w.margin;
  r.node_i = w.i;
  r.node_n = w.n;
  r.note = std::move(note);
  return r;
}

}  // namespace

HypothesisReport validate_walls(const WallPair& walls, const Grid& grid) {
  HypothesisReport report;

  WorstCase h1, h4, h3, bnd;
  double h2_max_abs_rate = 0.0;

  for (int n = 0; n <= grid.nt; ++n) {
    const double t = grid.t(n);
    // boundary signs at both ends
    for (int i : {0, grid.nx}) {
      const double x = grid.x(i);
      bnd.update(-walls.lower.value(x, t), i, n);
      bnd.update(walls.upper.value(x, t), i, n);
      h3.update(-std::abs(walls.lower.dt(x, t)), i, n);
      h3.update(-std::abs(walls.upper.dt(x, t)), i, n);
    }
    for (int i = 1; i < grid.nx; ++i) {
      const double x = grid.x(i);
      h1.update(walls.upper.value(x, t) - walls.lower.value(x, t), i, n);
    }
    if (n < grid.nt) {
      const double t1 = grid.t(n + 1);
      for (int i = 0; i <= grid.nx; ++i) {
        const double x = grid.x(i);
        const double gap0 = walls.upper.value(x, t) - walls.lower.value(x, t);
        const double gap1 = walls.upper.value(x, t1) - walls.lower.value(x, t1);
        h4.update(gap1 - gap0, i, n);
      }
    }
    for (int i = 0; i <= grid.nx; ++i) {
      const double x = grid.x(i);
      h2_max_abs_rate = std::max(h2_max_abs_rate,
                                 std::max(std::abs(walls.lower.dt(x, t) + walls.lower.dxx(x, t)),
                                          std::abs(walls.upper.dt(x, t) + walls.upper.dxx(x, t))));
    }
  }

  // H1 is strict: a zero gap already fails.
  {
    CheckResult r;
    r.name = "H1";
    r.status = h1.margin > 0.0 ? CheckStatus::Pass : CheckStatus::Fail;
    r.margin = h1.margin;
    r.node_i = h1.i;
    r.node_n = h1.n;
    report.checks.push_back(std::move(r));
  }
  {
    CheckResult r;
    r.name = "H2";
    r.status = std::isfinite(h2_max_abs_rate) ? CheckStatus::Pass : CheckStatus::Fail;
    r.margin = h2_max_abs_rate;
    r.note = "closed-form dt h + dxx h, max |value| on lattice";
    report.checks.push_back(std::move(r));
  }
  report.checks.push_back(make_result("H3", h3, kTol,
                                      "walls moving at x = 0, 1 are flagged, not forbidden"));
  report.checks.push_back(make_result("H4", h4, kTol));
  report.checks.push_back(make_result("boundary_sign", bnd, kTol));
  return report;
}

HypothesisReport validate_coefficients(const CoefficientSet& coeffs, double u_lo, double u_hi) {
  if (!(u_hi > u_lo)) throw std::invalid_argument("validate_coefficients: u_hi must exceed u_lo");
  constexpr int kLadder = 1024;

  double max_abs_sigma = 0.0, max_abs_fp = 0.0, max_abs_sp = 0.0;
  double min_sigma = std::numeric_limits<double>::infinity();
  int min_sigma_k = -1;
  for (int k = 0; k < kLadder; ++k) {
    const double u = u_lo + (u_hi - u_lo) * (static_cast<double>(k) / (kLadder - 1));
    const double s = coeffs.sigma.value(0.0, 0.0, u);
    max_abs_sigma = std::max(max_abs_sigma, std::abs(s));
    max_abs_fp = std::max(max_abs_fp, std::abs(coeffs.f.deriv(0.0, 0.0, u)));
    max_abs_sp = std::max(max_abs_sp, std::abs(coeffs.sigma.deriv(0.0, 0.0, u)));
    if (s < min_sigma) { min_sigma = s; min_sigma_k = k; }
  }

  HypothesisReport report;
  {
    CheckResult r;
    r.name = "F";
    const double m_sigma = coeffs.sigma_bound - max_abs_sigma;
    const double m_lip = coeffs.lipschitz - std::max(max_abs_fp, max_abs_sp);
    r.margin = std::min(m_sigma, m_lip);
    r.status = r.margin >= -kTol ? CheckStatus::Pass : CheckStatus::Fail;
    std::ostringstream note;
    note << "max|sigma|=" << max_abs_sigma << " vs bound " << coeffs.sigma_bound
         << "; max(|f'|,|sigma'|)=" << std::max(max_abs_fp, max_abs_sp)
         << " vs Lipschitz " << coeffs.lipschitz;
    r.note = note.str();
    report.checks.push_back(std::move(r));
  }
  {
    CheckResult r;
    r.name = "sigma_positivity";
    if (coeffs.sigma_min > 0.0) {
      r.margin = min_sigma - coeffs.sigma_min;
      r.status = r.margin >= -kTol ? CheckStatus::Pass : CheckStatus::Fail;
      r.node_i = min_sigma_k;
      r.note = "ladder index of the minimising sample in node_i";
    } else {
      r.status = CheckStatus::NotChecked;
      r.note = "sigma_min = 0: no positivity declared";
    }
    report.checks.push_back(std::move(r));
  }
  return report;
}

}  // namespace respde
