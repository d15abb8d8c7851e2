#include "respde/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "respde/io.hpp"

namespace respde {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::NotChecked: return "not_checked";
  }
  return "not_checked";
}

json hypotheses_json(const HypothesisReport& report) {
  json arr = json::array();
  for (const auto& c : report.checks) {
    json entry = {{"name", c.name}, {"status", status_name(c.status)}, {"margin", c.margin}};
    if (c.node_i >= 0) entry["node_i"] = c.node_i;
    if (c.node_n >= 0) entry["node_n"] = c.node_n;
    if (!c.note.empty()) entry["note"] = c.note;
    arr.push_back(std::move(entry));
  }
  return arr;
}

json base_report(const char* subcommand, const RunConfig& cfg) {
  const Grid& g = cfg.grid;
  json report;
  report["schema"] = "respde-report-1";
  report["subcommand"] = subcommand;
  report["config"] = cfg.normalized();
  report["observation"] = {{"x0_requested", cfg.observation.x0},
                           {"x0_index", cfg.observation.x0_index},
                           {"x0_node", g.x(cfg.observation.x0_index)},
                           {"x0_snap_distance", cfg.observation.x0_snap_distance},
                           {"t0_requested", cfg.observation.t0},
                           {"t0_index", cfg.observation.t0_index},
                           {"t0_node", g.t(cfg.observation.t0_index)},
                           {"t0_snap_distance", cfg.observation.t0_snap_distance}};
  return report;
}

json manifest_json(const std::vector<FileRecord>& files) {
  json arr = json::array();
  for (const auto& f : files) {
    arr.push_back({{"name", f.name}, {"bytes", f.bytes}, {"fnv1a64", f.fnv1a64}});
  }
  return arr;
}

HypothesisReport structural_checks(const RunConfig& cfg) {
  HypothesisReport report = validate_walls(cfg.walls, cfg.grid);
  const Matrix lo = wall_lattice(cfg.walls.lower, cfg.grid);
  const Matrix hi = wall_lattice(cfg.walls.upper, cfg.grid);
  double band_lo = lo.data()[0], band_hi = hi.data()[0];
  for (double v : lo.data()) band_lo = std::min(band_lo, v);
  for (double v : hi.data()) band_hi = std::max(band_hi, v);
  report.merge(validate_coefficients(cfg.coeffs, band_lo, band_hi));
  return report;
}

struct PathStats {
  double sup_abs_u = 0.0;
  double max_lower_violation = 0.0;
  double max_upper_violation = 0.0;
  double eta_mass = 0.0;
  double xi_mass = 0.0;
};

PathStats path_stats(const Solver& solver, const SolutionPath& path) {
  PathStats s;
  const Grid& g = path.grid;
  for (int n = 0; n <= g.nt; ++n) {
    for (int i = 0; i <= g.nx; ++i) {
      const double u = path.u(n, i);
      s.sup_abs_u = std::max(s.sup_abs_u, std::abs(u));
      s.max_lower_violation = std::max(s.max_lower_violation, solver.wall_lower(n, i) - u);
      s.max_upper_violation = std::max(s.max_upper_violation, u - solver.wall_upper(n, i));
    }
  }
  s.max_lower_violation = std::max(s.max_lower_violation, 0.0);
  s.max_upper_violation = std::max(s.max_upper_violation, 0.0);
  s.eta_mass = std::accumulate(path.eta.data().begin(), path.eta.data().end(), 0.0);
  s.xi_mass = std::accumulate(path.xi.data().begin(), path.xi.data().end(), 0.0);
  return s;
}

struct FieldStats {
  double min = 0.0;
  double max = 0.0;
};

// Extrema over the rows strictly after the source step (earlier rows are
// structurally zero and would mask the sign of the field).
FieldStats field_stats(const Matrix& field, int first_row) {
  FieldStats s;
  bool any = false;
  for (std::size_t n = static_cast<std::size_t>(first_row); n < field.rows(); ++n) {
    for (std::size_t i = 1; i + 1 < field.cols(); ++i) {
      const double v = field(n, i);
      if (!any) {
        s.min = s.max = v;
        any = true;
      } else {
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
      }
    }
  }
  return s;
}

}  // namespace

RunResult run_validate(const RunConfig& cfg) {
  const auto start = Clock::now();
  HypothesisReport checks = structural_checks(cfg);
  RunResult result;
  result.report = base_report("validate", cfg);
  result.report["hypotheses"] = hypotheses_json(checks);
  result.report["required_pass"] = checks.required_pass();
  result.report["summary"] = checks.summary();
  result.report["timings_ms"] = {{"total", ms_since(start)}};
  result.exit_code = checks.required_pass() ? 0 : 1;
  return result;
}

RunResult run_solve(const RunConfig& cfg, const RunOptions& opts) {
  const auto start = Clock::now();
  const std::uint64_t seed = opts.seed.value_or(cfg.ensemble.base_seed);

  Solver solver(cfg.solver_config());
  const NoiseField noise = sample_noise(cfg.grid, seed);
  const SolutionPath path = solver.solve(noise);
  const double solve_ms = ms_since(start);

  const PathStats stats = path_stats(solver, path);
  const auto [comp_lower, comp_upper] = complementarity(path, cfg.walls);

  std::vector<FileRecord> files;
  if (cfg.output.csv) {
    files.push_back(write_file(cfg.output.directory, "u.csv",
                               lattice_csv(path.u, cfg.grid, "u", 0)));
    files.push_back(write_file(cfg.output.directory, "eta.csv",
                               lattice_csv(path.eta, cfg.grid, "eta", 1)));
    files.push_back(write_file(cfg.output.directory, "xi.csv",
                               lattice_csv(path.xi, cfg.grid, "xi", 1)));
  }

  RunResult result;
  result.report = base_report("solve", cfg);
  result.report["seed"] = seed;
  result.report["hypotheses"] = hypotheses_json(solver.validation());
  result.report["stats"] = {{"sup_abs_u", stats.sup_abs_u},
                            {"max_lower_violation", stats.max_lower_violation},
                            {"max_upper_violation", stats.max_upper_violation},
                            {"eta_mass", stats.eta_mass},
                            {"xi_mass", stats.xi_mass},
                            {"complementarity_lower", comp_lower},
                            {"complementarity_upper", comp_upper},
                            {"initial_clipped", solver.initial_was_clipped()}};
  result.report["manifest"] = manifest_json(files);
  result.report["timings_ms"] = {{"solve", solve_ms}, {"total", ms_since(start)}};
  return result;
}

RunResult run_sweep(const RunConfig& cfg) {
  const auto start = Clock::now();
  const SweepTable table =
      sweep(cfg.solver_config(), cfg.sweep.epsilons, cfg.sweep.deltas, cfg.sweep.seed);
  const double sweep_ms = ms_since(start);

  std::string inner = "epsilon,delta,inner_sup_diff,max_lower_violation,max_upper_violation\n";
  for (const auto& e : table.entries) {
    inner += format_double(e.epsilon) + ',' + format_double(e.delta) + ',' +
             format_double(e.inner_diff) + ',' + format_double(e.max_lower_violation) + ',' +
             format_double(e.max_upper_violation) + '\n';
  }
  std::string outer = "eps_coarse,eps_fine,outer_sup_diff,ordering_min\n";
  for (const auto& e : table.outer) {
    outer += format_double(e.eps_coarse) + ',' + format_double(e.eps_fine) + ',' +
             format_double(e.outer_diff) + ',' + format_double(e.ordering_min) + '\n';
  }

  std::vector<FileRecord> files;
  if (cfg.output.csv) {
    files.push_back(write_file(cfg.output.directory, "sweep_inner.csv", inner));
    files.push_back(write_file(cfg.output.directory, "sweep_outer.csv", outer));
  }

  double worst_ordering = 0.0;
  bool have_outer = !table.outer.empty();
  if (have_outer) {
    worst_ordering = table.outer.front().ordering_min;
    for (const auto& e : table.outer) worst_ordering = std::min(worst_ordering, e.ordering_min);
  }

  json entries = json::array();
  for (const auto& e : table.entries) {
    entries.push_back({{"epsilon", e.epsilon},
                       {"delta", e.delta},
                       {"inner_sup_diff", e.inner_diff},
                       {"max_lower_violation", e.max_lower_violation},
                       {"max_upper_violation", e.max_upper_violation}});
  }
  json outer_entries = json::array();
  for (const auto& e : table.outer) {
    outer_entries.push_back({{"eps_coarse", e.eps_coarse},
                             {"eps_fine", e.eps_fine},
                             {"outer_sup_diff", e.outer_diff},
                             {"ordering_min", e.ordering_min}});
  }

  RunResult result;
  result.report = base_report("sweep", cfg);
  result.report["seed"] = cfg.sweep.seed;
  result.report["inner"] = std::move(entries);
  result.report["outer"] = std::move(outer_entries);
  if (have_outer) result.report["worst_ordering_min"] = worst_ordering;
  result.report["manifest"] = manifest_json(files);
  result.report["timings_ms"] = {{"sweep", sweep_ms}, {"total", ms_since(start)}};
  return result;
}

RunResult run_malliavin(const RunConfig& cfg, const RunOptions& opts) {
  const auto start = Clock::now();
  const Grid& g = cfg.grid;
  const std::uint64_t seed = opts.seed.value_or(cfg.ensemble.base_seed);
  SourceCell source{std::max(1, cfg.observation.x0_index / 2), cfg.observation.t0_index / 2};
  if (opts.source) source = *opts.source;
  if (source.j < 1 || source.j > g.nx - 1)
    throw std::invalid_argument("malliavin source j must lie in 1..nx-1");
  if (source.m < 0 || source.m > g.nt - 1)
    throw std::invalid_argument("malliavin source m must lie in 0..nt-1");

  Solver solver(cfg.solver_config());
  const NoiseField noise = sample_noise(g, seed);
  const SolutionPath path = solver.solve(noise);

  const FirstVariationField d = first_variation(solver, path, noise, source);
  const FieldStats d_stats = field_stats(d.D, source.m + 1);

  json malliavin;
  malliavin["source"] = {{"j", source.j}, {"m", source.m}};
  malliavin["seed"] = seed;
  malliavin["d"] = {{"min", d_stats.min},
                    {"max", d_stats.max},
                    {"value_at_observation", d.D(cfg.observation.t0_index,
                                                 cfg.observation.x0_index)},
                    {"kink_cells", d.kink_cells.size()}};

  const bool factorizable = cfg.coeffs.sigma_min > 0.0;
  if (factorizable) {
    const FirstVariationField s = factorized_variation(solver, path, d);
    const FirstVariationField shat = dominating_variation(solver, path, noise, source);
    const FieldStats s_stats = field_stats(s.D, source.m + 1);
    double max_excess = 0.0;  // max (S - Shat); domination means <= 0 up to roundoff
    for (std::size_t k = 0; k < s.D.data().size(); ++k) {
      max_excess = std::max(max_excess, s.D.data()[k] - shat.D.data()[k]);
    }
    malliavin["s"] = {{"min", s_stats.min}, {"max", s_stats.max}};
    malliavin["s_minus_shat_max"] = max_excess;
  }

  const int stride = cfg.malliavin.stride;
  malliavin["norm_sq"] = {
      {"stride", stride},
      {"value", variation_norm_sq(solver, path, noise, cfg.observation.x0_index,
                                  cfg.observation.t0_index, stride)}};

  // Integrated lower bound around the observation node, with the source cell
  // as the left edge y and s the source time. Only sensible when the
  // reflected subinterval is wide enough and ends before t0.
  const int y = source.j;
  const int ytilde = std::min(2 * cfg.observation.x0_index - y, g.nx);
  if (y < cfg.observation.x0_index && ytilde - y >= 4 && source.m < cfg.observation.t0_index) {
    const LowerBoundResult lb =
        variation_lower_bound(solver, path, noise, y, source.m, cfg.observation.x0_index,
                              cfg.observation.t0_index, cfg.observation.a, cfg.observation.b,
                              0.0);
    malliavin["lower_bound"] = {{"y_index", y},
                                {"s_index", source.m},
                                {"ytilde_index", ytilde},
                                {"v", lb.v},
                                {"bound", lb.bound},
                                {"w_at_observation", lb.w_at_obs},
                                {"w_max_abs", lb.w_max_abs},
                                {"tau", lb.tau},
                                {"in_band", lb.in_band},
                                {"holds", lb.v >= lb.bound - 1e-3 * lb.w_max_abs}};
  }

  std::vector<FileRecord> files;
  const std::string field_name =
      "dfield_j" + std::to_string(source.j) + "_m" + std::to_string(source.m) + ".csv";
  if (cfg.output.csv) {
    files.push_back(write_file(cfg.output.directory, field_name,
                               lattice_csv(d.D, g, "D", 0)));
  }
  if (cfg.output.json) {
    files.push_back(write_file(cfg.output.directory, "malliavin.json",
                               malliavin.dump(2) + "\n"));
  }

  RunResult result;
  result.report = base_report("malliavin", cfg);
  result.report["malliavin"] = std::move(malliavin);
  result.report["manifest"] = manifest_json(files);
  result.report["timings_ms"] = {{"total", ms_since(start)}};
  return result;
}

RunResult run_density(const RunConfig& cfg, const RunOptions& opts) {
  const auto start = Clock::now();
  const EnsembleConfig ec = cfg.ensemble_config();
  const SampleSet samples = run_ensemble(ec, opts.threads);
  const double ensemble_ms = ms_since(start);

  const double interval_lo = samples.h1_obs + samples.a;
  const double interval_hi = samples.h2_obs - samples.b;
  const double gap = interval_hi - interval_lo;

  // Cluster masses at three width scales of the admissible interval; near-1
  // mass at the smallest width flags an atom in the sampled law.
  const std::vector<double> widths = {1e-2 * gap, 1e-3 * gap, 1e-4 * gap};
  const std::vector<double> atoms = atom_diagnostic(samples.values, widths);

  DensityEstimate estimate;
  std::string kde_error;
  try {
    estimate = kde(samples, cfg.density.bandwidth);
  } catch (const std::runtime_error& e) {
    kde_error = e.what();
  }

  const std::size_t n = samples.values.size();
  double mn = samples.values[0], mx = samples.values[0], mean = 0.0;
  for (double v : samples.values) {
    mn = std::min(mn, v);
    mx = std::max(mx, v);
    mean += v;
  }
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : samples.values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n - 1);
  std::size_t n_event = 0;
  for (auto f : samples.in_event) n_event += f;

  json summary;
  summary["N"] = static_cast<int>(n);
  summary["base_seed"] = samples.base_seed;
  summary["observation"] = {{"x0_index", cfg.observation.x0_index},
                            {"t0_index", cfg.observation.t0_index},
                            {"x0", cfg.grid.x(cfg.observation.x0_index)},
                            {"t0", cfg.grid.t(cfg.observation.t0_index)},
                            {"a", samples.a},
                            {"b", samples.b},
                            {"h1", samples.h1_obs},
                            {"h2", samples.h2_obs}};
  summary["event_fraction"] = static_cast<double>(n_event) / static_cast<double>(n);
  summary["samples"] = {{"min", mn}, {"max", mx}, {"mean", mean}, {"sd", std::sqrt(var)}};
  summary["atom_widths"] = widths;
  summary["atom_masses"] = atoms;
  if (kde_error.empty()) {
    double dmin = estimate.density[0], dmax = estimate.density[0];
    for (double v : estimate.density) {
      dmin = std::min(dmin, v);
      dmax = std::max(dmax, v);
    }
    summary["kde"] = {{"bandwidth", estimate.bandwidth},
                      {"integral", estimate.integral},
                      {"n_points", static_cast<int>(estimate.points.size())},
                      {"min_density", dmin},
                      {"max_density", dmax}};
  } else {
    summary["kde_error"] = kde_error;
  }

  std::vector<FileRecord> files;
  if (cfg.output.csv) {
    files.push_back(write_file(cfg.output.directory, "samples.csv", samples_csv(samples)));
    if (kde_error.empty()) {
      files.push_back(write_file(cfg.output.directory, "density.csv", density_csv(estimate)));
    }
  }
  if (cfg.output.json) {
    files.push_back(write_file(cfg.output.directory, "summary.json", summary.dump(2) + "\n"));
  }

  RunResult result;
  result.report = base_report("density", cfg);
  result.report["threads"] = opts.threads;
  result.report["density"] = std::move(summary);
  result.report["manifest"] = manifest_json(files);
  result.report["timings_ms"] = {{"ensemble", ensemble_ms}, {"total", ms_since(start)}};
  result.exit_code = kde_error.empty() ? 0 : 3;
  return result;
}

RunResult run_subcommand(const std::string& name, const RunConfig& cfg, const RunOptions& opts) {
  if (name == "validate") return run_validate(cfg);
  if (name == "solve") return run_solve(cfg, opts);
  if (name == "sweep") return run_sweep(cfg);
  if (name == "malliavin") return run_malliavin(cfg, opts);
  if (name == "density") return run_density(cfg, opts);
  throw std::invalid_argument("unknown subcommand: " + name);
}

}  // namespace respde
