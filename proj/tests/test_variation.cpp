#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "oracles.hpp"
#include "respde/density.hpp"
#include "respde/heat_kernel.hpp"
#include "respde/noise.hpp"
#include "respde/solver.hpp"
#include "respde/variation.hpp"

using namespace respde;

namespace {

SolverConfig free_field_config(double sigma_value) {
  SolverConfig cfg;
  cfg.grid = Grid{64, 512, 0.25};
  cfg.walls = {WallSpec::constant(-10.0), WallSpec::constant(10.0)};
  cfg.coeffs.sigma = CoeffRule::constant(sigma_value);
  cfg.coeffs.sigma_bound = std::abs(sigma_value) + 1.0;
  cfg.penalty = PenaltyKind::Smooth;
  cfg.epsilon = 1e-2;
  cfg.delta = 1e-2;
  return cfg;
}

SolverConfig banded_smooth_config() {
  SolverConfig cfg;
  cfg.grid = Grid{64, 512, 0.25};
  cfg.walls = {WallSpec::constant(-0.05), WallSpec::constant(0.05)};
  cfg.coeffs.f = CoeffRule::linear(0.0, -0.4);
  cfg.coeffs.sigma = CoeffRule::linear(0.3, 0.1);
  cfg.coeffs.lipschitz = 0.45;
  cfg.coeffs.sigma_bound = 0.5;
  cfg.penalty = PenaltyKind::Smooth;
  cfg.epsilon = 1e-2;
  cfg.delta = 1e-2;
  return cfg;
}

double rel_l2_rows(const Matrix& got, const Matrix& want, int first_row) {
  double num = 0.0, den = 0.0;
  for (int n = first_row; n < got.rows(); ++n) {
    for (int i = 0; i < got.cols(); ++i) {
      const double d = got(n, i) - want(n, i);
      num += d * d;
      den += want(n, i) * want(n, i);
    }
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("variation field is adapted and vanishes on the boundary") {
  const SolverConfig cfg = banded_smooth_config();
  const Solver solver(cfg);
  const NoiseField noise = sample_noise(cfg.grid, 3);
  const SolutionPath path = solver.solve(noise);
  const SourceCell src{20, 100};
  const FirstVariationField field = first_variation(solver, path, noise, src);

  for (int n = 0; n <= src.m; ++n) {
    for (int i = 0; i <= cfg.grid.nx; ++i) CHECK(field.D(n, i) == 0.0);
  }
  for (int n = 0; n <= cfg.grid.nt; ++n) {
    CHECK(field.D(n, 0) == 0.0);
    CHECK(field.D(n, cfg.grid.nx) == 0.0);
  }
  // the seeded step must leave a strictly positive imprint at the source
  CHECK(field.D(src.m + 1, src.j) > 0.0);

  CHECK_THROWS_AS(first_variation(solver, path, noise, {0, 10}), std::invalid_argument);
  CHECK_THROWS_AS(first_variation(solver, path, noise, {cfg.grid.nx, 10}), std::invalid_argument);
  CHECK_THROWS_AS(first_variation(solver, path, noise, {5, -1}), std::invalid_argument);
  CHECK_THROWS_AS(first_variation(solver, path, noise, {5, cfg.grid.nt}), std::invalid_argument);
}

TEST_CASE("free-field variation equals a dense implicit matrix power") {
  SolverConfig cfg = free_field_config(0.25);
  const Solver solver(cfg);
  const NoiseField noise = sample_noise(cfg.grid, 8);
  const SolutionPath path = solver.solve(noise);
  const SourceCell src{20, 50};
  const FirstVariationField field = first_variation(solver, path, noise, src);

  const Grid& g = cfg.grid;
  const double r = g.dt() / (g.dx() * g.dx());
  std::vector<double> d(g.nx + 1, 0.0);
  d[src.j] = 0.25 / g.dx();
  for (int k = 1; k <= 17; ++k) {
    d = oracles::dense_implicit_step(d, r);
    if (k == 1 || k == 3 || k == 17) {
      for (int i = 0; i <= g.nx; ++i) {
        CHECK(field.D(src.m + k, i) == doctest::Approx(d[i]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("free-field variation tracks the heat kernel after a short lag") {
  SolverConfig cfg = free_field_config(0.25);
  cfg.grid = Grid{64, 1024, 0.25};
  const Solver solver(cfg);
  const NoiseField noise = sample_noise(cfg.grid, 5);
  const SolutionPath path = solver.solve(noise);
  const SourceCell src{20, 100};
  const FirstVariationField field = first_variation(solver, path, noise, src);

  const Grid& g = cfg.grid;
  double prev = 1.0;
  for (int lag : {10, 40, 160}) {
    const int n = src.m + lag;
    const double t = g.t(n) - g.t(src.m);
    double num = 0.0, den = 0.0;
    for (int i = 0; i <= g.nx; ++i) {
      const double k = 0.25 * heat_kernel(g.x(i), g.x(src.j), t, KernelSpec{});
      const double d = field.D(n, i) - k;
      num += d * d;
      den += k * k;
    }
    const double rel = std::sqrt(num / den);
    CHECK(rel <= 0.05);
    CHECK(rel < prev);  // the scheme converges toward the kernel as the lag grows
    prev = rel;
  }
}

TEST_CASE("bump-and-rerun reproduces the derivative field") {
  const SolverConfig cfg = banded_smooth_config();
  const Solver solver(cfg);
  const Grid& g = cfg.grid;
  for (std::uint64_t seed : {3ull, 11ull}) {
    const NoiseField noise = sample_noise(g, seed);
    const SolutionPath path = solver.solve(noise);
    for (const SourceCell src : {SourceCell{20, 100}, SourceCell{40, 300}}) {
      const FirstVariationField field = first_variation(solver, path, noise, src);

      const double dw = 1e-4;
      NoiseField shifted = noise;
      shifted.xi(src.m, src.j) += dw / std::sqrt(g.dx() * g.dt());
      const SolutionPath bumped = solver.solve(shifted);

      double num = 0.0, den = 0.0;
      for (int n = src.m + 1; n <= g.nt; ++n) {
        for (int i = 0; i <= g.nx; ++i) {
          const double fd = (bumped.u(n, i) - path.u(n, i)) / dw;
          const double d = field.D(n, i);
          num += (fd - d) * (fd - d);
          den += d * d;
        }
      }
      CHECK(std::sqrt(num / den) <= 0.05);
    }
  }
}

TEST_CASE("streamed value agrees with the materialised field") {
  const SolverConfig cfg = banded_smooth_config();
  const Solver solver(cfg);
  const NoiseField noise = sample_noise(cfg.grid, 17);
  const SolutionPath path = solver.solve(noise);
  const SourceCell src{12, 60};
  const FirstVariationField field = first_variation(solver, path, noise, src);
  CHECK(variation_value_at(solver, path, noise, src, 32, 400) == field.D(400, 32));
  CHECK(variation_value_at(solver, path, noise, src, 32, 60) == 0.0);
}

TEST_CASE("unit dispersion makes the factorized field the plain one") {
  SolverConfig cfg = free_field_config(1.0);
  cfg.coeffs.sigma_min = 1.0;
  const Solver solver(cfg);
  const NoiseField noise = sample_noise(cfg.grid, 4);
  const SolutionPath path = solver.solve(noise);
  const FirstVariationField field = first_variation(solver, path, noise, {16, 32});
  const FirstVariationField s = factorized_variation(solver, path, field);
  CHECK(s.D == field.D);

  SolverConfig no_floor = free_field_config(1.0);
  const Solver bare(no_floor);
  CHECK_THROWS_AS(factorized_variation(bare, path, field), std::domain_error);
}

TEST_CASE("factorized field stays nonnegative and dominated at active walls") {
  SolverConfig cfg;
  cfg.grid = Grid{64, 512, 0.25};
  cfg.walls = {WallSpec::constant(-0.05), WallSpec::constant(0.05)};
  cfg.coeffs.sigma = CoeffRule::constant(0.3);
  cfg.coeffs.sigma_bound = 0.3;
  cfg.coeffs.sigma_min = 0.3;
  cfg.penalty = PenaltyKind::Smooth;
  cfg.epsilon = 1e-2;
  cfg.delta = 1e-2;
  const Solver solver(cfg);
  const SourceCell src{16, 64};

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const NoiseField noise = sample_noise(cfg.grid, seed);
    const SolutionPath path = solver.solve(noise);
    const FirstVariationField s =
        factorized_variation(solver, path, first_variation(solver, path, noise, src));
    const FirstVariationField shat = dominating_variation(solver, path, noise, src);

    double s_min = 0.0, gap_max = -1.0;
    for (int n = 0; n <= cfg.grid.nt; ++n) {
      for (int i = 0; i <= cfg.grid.nx; ++i) {
        s_min = std::min(s_min, s.D(n, i));
        gap_max = std::max(gap_max, s.D(n, i) - shat.D(n, i));
      }
    }
    CHECK(s_min >= -1e-10);
    CHECK(s.D(src.m + 1, src.j) > 0.0);
    CHECK(gap_max <= 1e-8);
  }
}

TEST_CASE("dominating field coincides with the factorized one when walls never bind") {
  SolverConfig cfg = free_field_config(0.5);  // 0.5 divides exactly in binary
  cfg.coeffs.f = CoeffRule::linear(0.0, -0.3);
  cfg.coeffs.lipschitz = 0.3;
  cfg.coeffs.sigma_min = 0.5;
  const Solver solver(cfg);
  const NoiseField noise = sample_noise(cfg.grid, 6);
  const SolutionPath path = solver.solve(noise);
  const SourceCell src{40, 128};
  const FirstVariationField s =
      factorized_variation(solver, path, first_variation(solver, path, noise, src));
  const FirstVariationField shat = dominating_variation(solver, path, noise, src);
  CHECK(s.D == shat.D);
}

TEST_CASE("dominating-field moments are stable across penalty scales") {
  SolverConfig cfg;
  cfg.grid = Grid{64, 512, 0.25};
  cfg.walls = {WallSpec::constant(-0.05), WallSpec::constant(0.05)};
  cfg.coeffs.sigma = CoeffRule::sine(0.3, 0.1, 2.0);
  cfg.coeffs.lipschitz = 0.25;
  cfg.coeffs.sigma_bound = 0.4;
  cfg.coeffs.sigma_min = 0.2;
  cfg.penalty = PenaltyKind::Smooth;
  const SourceCell src{32, 64};

  double lo = 1e300, hi = 0.0;
  for (double eps : {1e-1, 1e-2}) {
    for (double del : {1e-1, 1e-2}) {
      cfg.epsilon = eps;
      cfg.delta = del;
      const Solver solver(cfg);
      double acc = 0.0;
      for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const NoiseField noise = sample_noise(cfg.grid, seed);
        const SolutionPath path = solver.solve(noise);
        const FirstVariationField shat = dominating_variation(solver, path, noise, src);
        double q = 0.0;
        for (double v : shat.D.data()) q += v * v;
        q *= cfg.grid.dx() * cfg.grid.dt();
        acc += q * q;  // second power of the squared-field integral
      }
      acc /= 50.0;
      lo = std::min(lo, acc);
      hi = std::max(hi, acc);
    }
  }
  CHECK(lo > 0.0);
  CHECK(hi / lo < 2.0);
}

TEST_CASE("hard-penalty contact flags kink cells") {
  SolverConfig cfg;
  cfg.grid = Grid{16, 32, 0.1};
  cfg.walls = {WallSpec::constant(0.0), WallSpec::constant(10.0)};
  cfg.penalty = PenaltyKind::Hard;
  cfg.epsilon = 1e-2;
  cfg.delta = 1e-2;
  const Solver solver(cfg);
  const NoiseField noise = sample_noise(cfg.grid, 1);
  const SolutionPath path = solver.solve(noise);  // sigma = f = 0: path stays pinned at the wall
  for (double v : path.u.data()) CHECK(v == 0.0);

  const SourceCell src{8, 4};
  const FirstVariationField field = first_variation(solver, path, noise, src);
  const std::size_t expected =
      static_cast<std::size_t>(cfg.grid.nt - src.m) * (cfg.grid.nx - 1);
  CHECK(field.kink_cells.size() == expected);

  // away from any wall nothing is flagged
  SolverConfig wide = free_field_config(0.3);
  wide.penalty = PenaltyKind::Hard;
  const Solver wide_solver(wide);
  const NoiseField wn = sample_noise(wide.grid, 1);
  const SolutionPath wp = wide_solver.solve(wn);
  CHECK(first_variation(wide_solver, wp, wn, src).kink_cells.empty());
}

TEST_CASE("localized variation geometry") {
  SolverConfig cfg;
  cfg.grid = Grid{40, 128, 0.25};
  cfg.walls = {WallSpec::constant(-10.0), WallSpec::constant(10.0)};
  cfg.coeffs.sigma = CoeffRule::constant(0.25);
  cfg.coeffs.sigma_bound = 0.25;
  cfg.penalty = PenaltyKind::Smooth;
  cfg.epsilon = 1e-2;
  cfg.delta = 1e-2;
  const Solver solver(cfg);
  const NoiseField noise = sample_noise(cfg.grid, 2);
  const SolutionPath path = solver.solve(noise);

  // y=0.3, x0=0.5 -> reflected end at 0.7
  const LocalizedVariation mid = localized_variation(solver, path, noise, 12, 16, 20);
  CHECK(mid.ytilde_index == 28);
  // y=0.1, x0=0.9 -> reflected end capped at 1
  const LocalizedVariation capped = localized_variation(solver, path, noise, 4, 16, 36);
  CHECK(capped.ytilde_index == 40);

  const Grid& g = cfg.grid;
  for (int i = 13; i < 28; ++i) {
    CHECK(mid.w(16, i) ==
          cfg.coeffs.sigma.value(g.x(i), g.t(16), path.u(16, i)));
  }
  CHECK(mid.w(16, 12) == 0.0);
  CHECK(mid.w(16, 28) == 0.0);
  for (int n = 0; n <= g.nt; ++n) {
    for (int i = 0; i <= g.nx; ++i) {
      if (n < 16 || i < 12 || i > 28) CHECK(mid.w(n, i) == 0.0);
    }
  }

  CHECK_THROWS_AS(localized_variation(solver, path, noise, 20, 16, 12), std::invalid_argument);
  CHECK_THROWS_AS(localized_variation(solver, path, noise, 19, 16, 20), std::invalid_argument);
  CHECK_THROWS_AS(localized_variation(solver, path, noise, 12, 128, 20), std::invalid_argument);
}

TEST_CASE("localized variation follows the subinterval heat evolution") {
  SolverConfig cfg = free_field_config(0.25);
  const Solver solver(cfg);
  const NoiseField noise = sample_noise(cfg.grid, 7);
  const SolutionPath path = solver.solve(noise);
  const int y = 16, s = 256, x0 = 32;
  const LocalizedVariation loc = localized_variation(solver, path, noise, y, s, x0);
  REQUIRE(loc.ytilde_index == 48);

  const Grid& g = cfg.grid;
  const double ya = g.x(y);
  const double sub_len = g.x(loc.ytilde_index) - ya;
  for (int lag : {10, 40, 128}) {
    const int n = s + lag;
    const double t = g.t(n) - g.t(s);
    double num = 0.0, den = 0.0;
    for (int i = y; i <= loc.ytilde_index; ++i) {
      double k = 0.0;
      for (int j = y + 1; j < loc.ytilde_index; ++j) {
        k += oracles::images_kernel(g.x(i) - ya, g.x(j) - ya, t, sub_len) * g.dx();
      }
      k *= 0.25;
      const double d = loc.w(n, i) - k;
      num += d * d;
      den += k * k;
    }
    CHECK(std::sqrt(num / den) <= 0.05);
  }
}

TEST_CASE("stopping time detects margin crossings") {
  // far walls: never stopped
  SolverConfig cfg = free_field_config(0.3);
  const Solver solver(cfg);
  const NoiseField noise = sample_noise(cfg.grid, 9);
  const SolutionPath path = solver.solve(noise);
  const StoppingInfo never = stopping_time(path, cfg.walls, 16, 64, 32, 0.1, 0.1);
  CHECK(std::isinf(never.tau));
  CHECK(never.in_band);
  CHECK(never.lower_margin.size() == static_cast<std::size_t>(cfg.grid.nt - 64 + 1));

  // margin exactly a/2 at the start: outside the band, stopped immediately
  SolverConfig flat;
  flat.grid = Grid{32, 32, 0.1};
  flat.walls = {WallSpec::constant(-0.1), WallSpec::constant(10.0)};
  flat.penalty = PenaltyKind::Hard;
  flat.epsilon = 1e-2;
  flat.delta = 1e-2;
  const Solver flat_solver(flat);
  const NoiseField quiet = sample_noise(flat.grid, 0);
  const SolutionPath still = flat_solver.solve(quiet);  // sigma = f = 0: u stays 0
  const StoppingInfo edge = stopping_time(still, flat.walls, 8, 0, 16, 0.2, 0.2);
  CHECK_FALSE(edge.in_band);
  CHECK(edge.tau == 0.0);

  CHECK_THROWS_AS(stopping_time(still, flat.walls, 8, 0, 16, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(stopping_time(still, flat.walls, 8, 0, 16, 0.1, -0.2), std::invalid_argument);
}

TEST_CASE("drifting path stops when the scanned margin crosses the threshold") {
  SolverConfig cfg;
  cfg.grid = Grid{32, 256, 0.1};
  cfg.walls = {WallSpec::constant(-0.5), WallSpec::constant(10.0)};
  cfg.coeffs.f = CoeffRule::constant(-10.0);  // steady push toward the lower wall
  cfg.coeffs.lipschitz = 0.0;
  cfg.penalty = PenaltyKind::Hard;
  cfg.epsilon = 1e-2;
  cfg.delta = 1e-2;
  const Solver solver(cfg);
  const NoiseField quiet = sample_noise(cfg.grid, 0);
  const SolutionPath path = solver.solve(quiet);

  const int y = 8, s = 0, x0 = 16;
  const double a = 0.2, b = 0.2;
  const StoppingInfo info = stopping_time(path, cfg.walls, y, s, x0, a, b);
  CHECK(info.in_band);
  CHECK(std::isfinite(info.tau));

  // independent scan of the stored path
  const int ytilde = 2 * x0 - y;
  double expected = std::numeric_limits<double>::infinity();
  for (int n = s; n <= cfg.grid.nt; ++n) {
    double lo = 1e300;
    for (int i = y; i <= ytilde; ++i) lo = std::min(lo, path.u(n, i) + 0.5);
    if (lo <= 0.5 * a) {
      expected = cfg.grid.t(n);
      break;
    }
  }
  CHECK(info.tau == expected);
}

TEST_CASE("lower bound reduces to sign check once stopped early") {
  SolverConfig cfg;
  cfg.grid = Grid{32, 256, 0.1};
  cfg.walls = {WallSpec::constant(-0.5), WallSpec::constant(10.0)};
  cfg.coeffs.f = CoeffRule::constant(-10.0);
  cfg.penalty = PenaltyKind::Hard;
  cfg.epsilon = 1e-2;
  cfg.delta = 1e-2;
  const Solver solver(cfg);
  const NoiseField quiet = sample_noise(cfg.grid, 0);
  const SolutionPath path = solver.solve(quiet);

  const LowerBoundResult res =
      variation_lower_bound(solver, path, quiet, 8, 0, 16, cfg.grid.nt, 0.2, 0.2, 1e-9);
  CHECK(res.tau <= cfg.grid.t(cfg.grid.nt));
  CHECK(res.bound == 0.0);
  CHECK(res.v == 0.0);  // sigma = 0: no sensitivity at all
  CHECK(res.holds);
}

TEST_CASE("lower bound matches kernel integrals in the free field") {
  SolverConfig cfg = free_field_config(0.25);
  const Solver solver(cfg);
  const NoiseField noise = sample_noise(cfg.grid, 7);
  const SolutionPath path = solver.solve(noise);
  const int y = 16, s = 256, x0 = 32, t0 = 384;

  const LowerBoundResult res =
      variation_lower_bound(solver, path, noise, y, s, x0, t0, 0.05, 0.05, 1e-6 * 0.25);
  CHECK(std::isinf(res.tau));
  CHECK(res.holds);
  CHECK(res.v >= res.bound);  // strictly more room on the full interval

  const Grid& g = cfg.grid;
  const int ytilde = 2 * x0 - y;
  const double ya = g.x(y);
  const double sub_len = g.x(ytilde) - ya;
  const double t = g.t(t0) - g.t(s);
  double v_oracle = 0.0, bound_oracle = 0.0;
  for (int j = y + 1; j < ytilde; ++j) {
    v_oracle += oracles::images_kernel(g.x(x0), g.x(j), t, 1.0) * g.dx();
    bound_oracle += oracles::images_kernel(g.x(x0) - ya, g.x(j) - ya, t, sub_len) * g.dx();
  }
  v_oracle *= 0.25;
  bound_oracle *= 0.25;
  CHECK(res.v == doctest::Approx(v_oracle).epsilon(0.10));
  CHECK(res.bound == doctest::Approx(bound_oracle).epsilon(0.10));
}

TEST_CASE("lower bound holds statistically at active walls") {
  SolverConfig cfg;
  cfg.grid = Grid{64, 512, 0.25};
  cfg.walls = {WallSpec::constant(-0.5), WallSpec::constant(0.5)};
  cfg.coeffs.sigma = CoeffRule::constant(0.3);
  cfg.coeffs.sigma_bound = 0.3;
  cfg.coeffs.sigma_min = 0.3;
  cfg.penalty = PenaltyKind::Smooth;
  cfg.epsilon = 1e-2;
  cfg.delta = 1e-2;
  const Solver solver(cfg);

  int held = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const NoiseField noise = sample_noise(cfg.grid, seed);
    const SolutionPath path = solver.solve(noise);
    for (const auto& [y, s] : {std::pair<int, int>{16, 128}, {24, 256}}) {
      const LocalizedVariation loc = localized_variation(solver, path, noise, y, s, 32);
      double w_max = 0.0;
      for (double v : loc.w.data()) w_max = std::max(w_max, std::abs(v));
      const LowerBoundResult res =
          variation_lower_bound(solver, path, noise, y, s, 32, 448, 0.1, 0.1, 1e-3 * w_max);
      ++total;
      if (res.holds) ++held;
    }
  }
  CHECK(total == 10);
  CHECK(held >= 9);
}

TEST_CASE("variation norm") {
  SolverConfig zero_cfg = free_field_config(0.0);
  const Solver zero_solver(zero_cfg);
  const NoiseField zn = sample_noise(zero_cfg.grid, 2);
  const SolutionPath zp = zero_solver.solve(zn);
  CHECK(variation_norm_sq(zero_solver, zp, zn, 32, 256, 4) == 0.0);
  CHECK_THROWS_AS(variation_norm_sq(zero_solver, zp, zn, 32, 256, 0), std::invalid_argument);
  CHECK_THROWS_AS(variation_norm_sq(zero_solver, zp, zn, 0, 256, 4), std::invalid_argument);

  // unit dispersion: the squared norm is a double kernel sum
  SolverConfig cfg = free_field_config(1.0);
  const Solver solver(cfg);
  const NoiseField noise = sample_noise(cfg.grid, 9);
  const SolutionPath path = solver.solve(noise);
  const int x0 = 32, t0 = 256, stride = 4;
  const double norm = variation_norm_sq(solver, path, noise, x0, t0, stride);

  const Grid& g = cfg.grid;
  double oracle = 0.0;
  for (int m = 0; m < t0; m += stride) {
    const double t = g.t(t0) - g.t(m);
    for (int j = 1; j <= g.nx - 1; j += stride) {
      const double k = heat_kernel(g.x(x0), g.x(j), t, KernelSpec{});
      oracle += k * k;
    }
  }
  oracle *= g.dx() * g.dt() * stride * stride;
  CHECK(norm == doctest::Approx(oracle).epsilon(0.10));

  // halving a constant dispersion scales the squared norm by exactly 1/4
  SolverConfig half_cfg = free_field_config(0.5);
  const Solver half_solver(half_cfg);
  const SolutionPath half_path = half_solver.solve(noise);
  const double half_norm = variation_norm_sq(half_solver, half_path, noise, x0, t0, stride);
  CHECK(norm == 4.0 * half_norm);
}

TEST_CASE("variation norm is strictly positive on margin-keeping paths") {
  SolverConfig cfg = free_field_config(0.3);
  cfg.walls = {WallSpec::constant(-0.5), WallSpec::constant(0.5)};
  cfg.coeffs.sigma_bound = 0.4;
  cfg.coeffs.sigma_min = 0.3;
  const Solver solver(cfg);

  const int x0 = 32, t0 = 384;
  int in_event = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const NoiseField noise = sample_noise(cfg.grid, seed);
    const SolutionPath path = solver.solve(noise);
    const double v = path.u(t0, x0);
    if (!detect_event(v, -0.5, 0.5, 0.1, 0.1)) continue;
    ++in_event;
    CHECK(variation_norm_sq(solver, path, noise, x0, t0, 8) > 0.0);
  }
  // at these walls every test path keeps the margins
  CHECK(in_event == 20);
}
