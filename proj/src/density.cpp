#include "respde/density.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "respde/rng.hpp"

namespace respde {

SampleSet run_ensemble(const EnsembleConfig& config, int threads) {
  if (config.n_paths < 100)
    throw std::invalid_argument("run_ensemble: need at least 100 paths");
  const Grid& g = config.solver.grid;
  if (config.x0_index < 1 || config.x0_index > g.nx - 1)
    throw std::invalid_argument("run_ensemble: x0 must be an interior node");
  if (config.t0_index < 1 || config.t0_index > g.nt)
    throw std::invalid_argument("run_ensemble: t0 out of range");
  if (!(config.a > 0.0) || !(config.b > 0.0))
    throw std::invalid_argument("run_ensemble: margins a, b must be > 0");
  if (threads < 1) threads = 1;

  const Solver solver(config.solver);

  SampleSet out;
  out.values.assign(config.n_paths, 0.0);
  out.base_seed = config.base_seed;
  out.a = config.a;
  out.b = config.b;
  const double x0 = g.x(config.x0_index);
  const double t0 = g.t(config.t0_index);
  out.h1_obs = config.solver.walls.lower.value(x0, t0);
  out.h2_obs = config.solver.walls.upper.value(x0, t0);

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::string error_message;

  auto worker = [&]() {
    for (;;) {
      const int p = next.fetch_add(1);
      if (p >= config.n_paths || failed.load()) return;
      const std::uint64_t seed = derive_seed(config.base_seed, static_cast<std::uint64_t>(p));
      try {
        const NoiseField noise = sample_noise(g, seed);
        const SolutionPath path = solver.solve(noise);
        out.values[p] = path.u(config.t0_index, config.x0_index);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) {
          std::ostringstream msg;
          msg << "run_ensemble: path " << p << " (seed " << seed << ") failed: " << e.what();
          error_message = msg.str();
        }
        return;
      }
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) throw std::runtime_error(error_message);

  out.in_event.resize(config.n_paths);
  for (int p = 0; p < config.n_paths; ++p)
    out.in_event[p] = detect_event(out.values[p], out.h1_obs, out.h2_obs, config.a, config.b);
  return out;
}

bool detect_event(double value, double h1_obs, double h2_obs, double a, double b) {
  return value - h1_obs >= a && h2_obs - value >= b;
}

DensityEstimate kde(const SampleSet& samples, double bandwidth, int n_points) {
  const std::size_t n = samples.values.size();
  if (n < 100) throw std::invalid_argument("kde: need at least 100 samples");
  if (n_points < 2) throw std::invalid_argument("kde: need at least 2 evaluation points");

  // Identical samples defeat any bandwidth rule; min == max is the robust
  // test (a mean-based spread picks up summation rounding of order 1e-17).
  const auto [mn, mx] = std::minmax_element(samples.values.begin(), samples.values.end());
  if (*mn == *mx)
    throw std::runtime_error(
        "kde: samples have zero spread (likely an atom in the sampled law); "
        "run atom_diagnostic instead");

  double mean = 0.0;
  for (double v : samples.values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : samples.values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  DensityEstimate est;
  est.bandwidth = bandwidth > 0.0
                      ? bandwidth
                      : 1.06 * sd * std::pow(static_cast<double>(n), -0.2);

  const double lo = samples.h1_obs + samples.a;
  const double hi = samples.h2_obs - samples.b;
  if (!(hi > lo))
    throw std::invalid_argument("kde: interior interval [h1+a, h2-b] is empty");

  est.points.resize(n_points);
  est.density.assign(n_points, 0.0);
  const double h = est.bandwidth;
  const double norm = 1.0 / (static_cast<double>(n) * h * std::sqrt(2.0 * 3.14159265358979323846));
  for (int k = 0; k < n_points; ++k) {
    const double p = lo + (hi - lo) * (static_cast<double>(k) / (n_points - 1));
    est.points[k] = p;
    double acc = 0.0;
    for (double v : samples.values) {
      const double z = (p - v) / h;
      acc += std::exp(-0.5 * z * z);
    }
    est.density[k] = acc * norm;
  }

  // Mass over [min-8h, max+8h], exact per kernel via the error function.
  const double A = *mn - 8.0 * h, B = *mx + 8.0 * h;
  double mass = 0.0;
  const double inv = 1.0 / (h * std::sqrt(2.0));
  for (double v : samples.values)
    mass += 0.5 * (std::erf((B - v) * inv) - std::erf((A - v) * inv));
  est.integral = mass / static_cast<double>(n);
  return est;
}

std::vector<double> atom_diagnostic(std::span<const double> values,
                                    std::span<const double> widths) {
  if (values.empty()) throw std::invalid_argument("atom_diagnostic: no samples");
  if (widths.empty()) throw std::invalid_argument("atom_diagnostic: no widths");
  for (std::size_t k = 0; k < widths.size(); ++k) {
    if (!(widths[k] > 0.0)) throw std::invalid_argument("atom_diagnostic: widths must be > 0");
    if (k > 0 && !(widths[k] < widths[k - 1]))
      throw std::invalid_argument("atom_diagnostic: widths must be strictly decreasing");
  }

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  std::vector<double> masses;
  masses.reserve(widths.size());
  for (double w : widths) {
    std::size_t best = 0, right = 0;
    for (std::size_t left = 0; left < n; ++left) {
      if (right < left) right = left;
      while (right + 1 < n && sorted[right + 1] <= sorted[left] + w) ++right;
      best = std::max(best, right - left + 1);
    }
    masses.push_back(static_cast<double>(best) / static_cast<double>(n));
  }
  return masses;
}

}  // namespace respde
