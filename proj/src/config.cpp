#include "respde/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace respde {

using nlohmann::json;

namespace {

std::string join_errors(const std::vector<std::string>& errs) {
  std::ostringstream out;
  out << "configuration errors:";
  for (const auto& e : errs) out << "\n  - " << e;
  return out.str();
}

// Collects problems while walking the document; every accessor names the key
// path it touched so messages point at the exact offender.
struct Cursor {
  std::vector<std::string>& errors;

  void fail(const std::string& path, const std::string& what) {
    errors.push_back(path + ": " + what);
  }

  // Rejects keys outside `allowed`; returns false when obj is not an object.
  bool check_keys(const json& obj, const std::string& path,
                  const std::set<std::string>& allowed) {
    if (!obj.is_object()) {
      fail(path, "expected an object");
      return false;
    }
    bool ok = true;
    for (const auto& item : obj.items()) {
      if (!allowed.contains(item.key())) {
        fail(path + "." + item.key(), "unknown key");
        ok = false;
      }
    }
    return ok;
  }

  double number(const json& obj, const std::string& path, const std::string& key,
                double fallback, bool* present = nullptr) {
    if (present != nullptr) *present = false;
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) {
      fail(path + "." + key, "expected a number");
      return fallback;
    }
    if (present != nullptr) *present = true;
    return v.get<double>();
  }

  int integer(const json& obj, const std::string& path, const std::string& key, int fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
      fail(path + "." + key, "expected an integer");
      return fallback;
    }
    return v.get<int>();
  }

  std::uint64_t seed(const json& obj, const std::string& path, const std::string& key,
                     std::uint64_t fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_unsigned() && !v.is_number_integer()) {
      fail(path + "." + key, "expected a nonnegative integer");
      return fallback;
    }
    if (v.is_number_integer() && v.get<std::int64_t>() < 0) {
      fail(path + "." + key, "expected a nonnegative integer");
      return fallback;
    }
    return v.get<std::uint64_t>();
  }

  std::string text(const json& obj, const std::string& path, const std::string& key,
                   const std::string& fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) {
      fail(path + "." + key, "expected a string");
      return fallback;
    }
    return v.get<std::string>();
  }
};

WallSpec parse_wall(Cursor& cur, const json& obj, const std::string& path) {
  WallSpec w;
  if (!obj.is_object()) {
    cur.fail(path, "expected an object");
    return w;
  }
  const std::string kind = cur.text(obj, path, "kind", "");
  if (kind == "constant") {
    cur.check_keys(obj, path, {"kind", "level"});
    w = WallSpec::constant(cur.number(obj, path, "level", 0.0));
  } else if (kind == "affine_t") {
    cur.check_keys(obj, path, {"kind", "level", "slope"});
    w = WallSpec::affine_t(cur.number(obj, path, "level", 0.0),
                           cur.number(obj, path, "slope", 0.0));
  } else if (kind == "sine_x") {
    cur.check_keys(obj, path, {"kind", "offset", "amplitude"});
    w = WallSpec::sine_x(cur.number(obj, path, "offset", 0.0),
                         cur.number(obj, path, "amplitude", 0.0));
  } else {
    cur.fail(path + ".kind", "expected one of: constant, affine_t, sine_x");
  }
  return w;
}

CoeffRule parse_rule(Cursor& cur, const json& obj, const std::string& path) {
  CoeffRule r = CoeffRule::zero();
  if (!obj.is_object()) {
    cur.fail(path, "expected an object");
    return r;
  }
  const std::string kind = cur.text(obj, path, "kind", "");
  if (kind == "zero") {
    cur.check_keys(obj, path, {"kind"});
  } else if (kind == "constant") {
    cur.check_keys(obj, path, {"kind", "value"});
    r = CoeffRule::constant(cur.number(obj, path, "value", 0.0));
  } else if (kind == "linear") {
    cur.check_keys(obj, path, {"kind", "intercept", "slope"});
    r = CoeffRule::linear(cur.number(obj, path, "intercept", 0.0),
                          cur.number(obj, path, "slope", 0.0));
  } else if (kind == "sine") {
    cur.check_keys(obj, path, {"kind", "offset", "amplitude", "frequency"});
    r = CoeffRule::sine(cur.number(obj, path, "offset", 0.0),
                        cur.number(obj, path, "amplitude", 0.0),
                        cur.number(obj, path, "frequency", 1.0));
  } else {
    cur.fail(path + ".kind", "expected one of: zero, constant, linear, sine");
  }
  return r;
}

json wall_to_json(const WallSpec& w) {
  switch (w.kind) {
    case WallKind::Constant: return {{"kind", "constant"}, {"level", w.a}};
    case WallKind::AffineT: return {{"kind", "affine_t"}, {"level", w.a}, {"slope", w.b}};
    case WallKind::SineX: return {{"kind", "sine_x"}, {"offset", w.a}, {"amplitude", w.b}};
  }
  return {};
}

json rule_to_json(const CoeffRule& r) {
  switch (r.kind) {
    case CoeffKind::Zero: return {{"kind", "zero"}};
    case CoeffKind::Constant: return {{"kind", "constant"}, {"value", r.a}};
    case CoeffKind::Linear: return {{"kind", "linear"}, {"intercept", r.a}, {"slope", r.b}};
    case CoeffKind::Sine:
      return {{"kind", "sine"}, {"offset", r.a}, {"amplitude", r.b}, {"frequency", r.c}};
  }
  return {};
}

// Measured maxima of the catalog rules over [lo, hi] on the same 1024-point
// ladder the structural checks use; these back the L / M_sigma defaults.
void measured_bounds(const CoefficientSet& coeffs, double lo, double hi, double& max_deriv,
                     double& max_sigma) {
  constexpr int kLadder = 1024;
  max_deriv = 0.0;
  max_sigma = 0.0;
  for (int k = 0; k < kLadder; ++k) {
    const double u = lo + (hi - lo) * (static_cast<double>(k) / (kLadder - 1));
    max_sigma = std::max(max_sigma, std::abs(coeffs.sigma.value(0.0, 0.0, u)));
    max_deriv = std::max(max_deriv, std::abs(coeffs.f.deriv(0.0, 0.0, u)));
    max_deriv = std::max(max_deriv, std::abs(coeffs.sigma.deriv(0.0, 0.0, u)));
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errs)
    : std::runtime_error(join_errors(errs)), errors(std::move(errs)) {}

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("document: not valid JSON (") + e.what() + ")"});
  }
  return parse_config_json(doc);
}

RunConfig parse_config_json(const json& doc) {
  std::vector<std::string> errors;
  Cursor cur{errors};
  RunConfig cfg;

  cur.check_keys(doc, "config",
                 {"grid", "walls", "coefficients", "penalty", "initial", "observation",
                  "ensemble", "sweep", "malliavin", "density", "output"});

  // grid (required)
  if (!doc.contains("grid")) {
    cur.fail("grid", "required section missing");
  } else {
    const json& g = doc.at("grid");
    if (cur.check_keys(g, "grid", {"nx", "nt", "T"})) {
      const int nx = cur.integer(g, "grid", "nx", 0);
      const int nt = cur.integer(g, "grid", "nt", 0);
      const double T = cur.number(g, "grid", "T", 0.0);
      try {
        cfg.grid = make_grid(nx, nt, T);
      } catch (const std::exception& e) {
        cur.fail("grid", e.what());
      }
    }
  }

  // walls (required)
  if (!doc.contains("walls")) {
    cur.fail("walls", "required section missing");
  } else {
    const json& w = doc.at("walls");
    if (cur.check_keys(w, "walls", {"lower", "upper"})) {
      if (w.contains("lower")) cfg.walls.lower = parse_wall(cur, w.at("lower"), "walls.lower");
      else cur.fail("walls.lower", "required key missing");
      if (w.contains("upper")) cfg.walls.upper = parse_wall(cur, w.at("upper"), "walls.upper");
      else cur.fail("walls.upper", "required key missing");
    }
  }

  // coefficients (required)
  bool have_L = false, have_M = false;
  if (!doc.contains("coefficients")) {
    cur.fail("coefficients", "required section missing");
  } else {
    const json& c = doc.at("coefficients");
    if (cur.check_keys(c, "coefficients", {"f", "sigma", "L", "M_sigma", "sigma_min"})) {
      if (c.contains("f")) cfg.coeffs.f = parse_rule(cur, c.at("f"), "coefficients.f");
      else cur.fail("coefficients.f", "required key missing");
      if (c.contains("sigma"))
        cfg.coeffs.sigma = parse_rule(cur, c.at("sigma"), "coefficients.sigma");
      else cur.fail("coefficients.sigma", "required key missing");
      cfg.coeffs.lipschitz = cur.number(c, "coefficients", "L", 0.0, &have_L);
      cfg.coeffs.sigma_bound = cur.number(c, "coefficients", "M_sigma", 0.0, &have_M);
      cfg.coeffs.sigma_min = cur.number(c, "coefficients", "sigma_min", 0.0);
      if (cfg.coeffs.sigma_min < 0.0) cur.fail("coefficients.sigma_min", "must be >= 0");
    }
  }

  // penalty
  {
    const json p = doc.contains("penalty") ? doc.at("penalty") : json::object();
    if (cur.check_keys(p, "penalty", {"variant", "epsilon", "delta"})) {
      const std::string variant = cur.text(p, "penalty", "variant", "hard");
      if (variant == "hard") cfg.penalty = PenaltyKind::Hard;
      else if (variant == "smooth") cfg.penalty = PenaltyKind::Smooth;
      else cur.fail("penalty.variant", "expected \"hard\" or \"smooth\"");
      cfg.epsilon = cur.number(p, "penalty", "epsilon", 0.1);
      cfg.delta = cur.number(p, "penalty", "delta", 0.1);
      if (!(cfg.epsilon > 0.0)) cur.fail("penalty.epsilon", "must be > 0");
      if (!(cfg.delta > 0.0)) cur.fail("penalty.delta", "must be > 0");
    }
  }

  // initial
  {
    const json ini = doc.contains("initial") ? doc.at("initial") : json::object();
    if (ini.is_object() && ini.contains("kind") && ini.at("kind").is_string() &&
        ini.at("kind").get<std::string>() == "sine") {
      if (cur.check_keys(ini, "initial", {"kind", "amplitude", "mode"})) {
        cfg.initial = InitialProfile::sine(cur.number(ini, "initial", "amplitude", 0.0),
                                           cur.integer(ini, "initial", "mode", 1));
        if (cfg.initial.mode < 1) cur.fail("initial.mode", "must be >= 1");
      }
    } else if (cur.check_keys(ini, "initial", {"kind"})) {
      const std::string kind = cur.text(ini, "initial", "kind", "zero");
      if (kind != "zero") cur.fail("initial.kind", "expected \"zero\" or \"sine\"");
      cfg.initial = InitialProfile::zero();
    }
  }

  // observation
  {
    const json o = doc.contains("observation") ? doc.at("observation") : json::object();
    if (cur.check_keys(o, "observation", {"x0", "t0", "a", "b"})) {
      cfg.observation.x0 = cur.number(o, "observation", "x0", 0.5);
      cfg.observation.t0 = cur.number(o, "observation", "t0", cfg.grid.T);
      cfg.observation.a = cur.number(o, "observation", "a", 0.05);
      cfg.observation.b = cur.number(o, "observation", "b", 0.05);
      if (!(cfg.observation.a > 0.0)) cur.fail("observation.a", "must be > 0");
      if (!(cfg.observation.b > 0.0)) cur.fail("observation.b", "must be > 0");
      if (!(cfg.observation.x0 > 0.0) || !(cfg.observation.x0 < 1.0))
        cur.fail("observation.x0", "must lie strictly inside (0, 1)");
      if (!(cfg.observation.t0 > 0.0) || cfg.observation.t0 > cfg.grid.T)
        cur.fail("observation.t0", "must lie in (0, T]");
    }
  }

  // ensemble
  {
    const json e = doc.contains("ensemble") ? doc.at("ensemble") : json::object();
    if (cur.check_keys(e, "ensemble", {"N", "base_seed"})) {
      cfg.ensemble.n_paths = cur.integer(e, "ensemble", "N", 1000);
      cfg.ensemble.base_seed = cur.seed(e, "ensemble", "base_seed", 12345);
      if (cfg.ensemble.n_paths < 100) cur.fail("ensemble.N", "must be >= 100");
    }
  }

  // sweep
  {
    const json s = doc.contains("sweep") ? doc.at("sweep") : json::object();
    if (cur.check_keys(s, "sweep", {"epsilons", "deltas", "seed"})) {
      auto parse_list = [&](const char* key, std::vector<double>& target) {
        if (!s.is_object() || !s.contains(key)) return;
        const json& arr = s.at(key);
        if (!arr.is_array() || arr.empty()) {
          cur.fail(std::string("sweep.") + key, "expected a nonempty array of numbers");
          return;
        }
        std::vector<double> vals;
        for (const auto& v : arr) {
          if (!v.is_number()) {
            cur.fail(std::string("sweep.") + key, "expected a nonempty array of numbers");
            return;
          }
          vals.push_back(v.get<double>());
        }
        for (std::size_t k = 0; k < vals.size(); ++k) {
          if (!(vals[k] > 0.0)) {
            cur.fail(std::string("sweep.") + key, "entries must be > 0");
            return;
          }
          if (k > 0 && !(vals[k] < vals[k - 1])) {
            cur.fail(std::string("sweep.") + key, "entries must be strictly decreasing");
            return;
          }
        }
        target = std::move(vals);
      };
      parse_list("epsilons", cfg.sweep.epsilons);
      parse_list("deltas", cfg.sweep.deltas);
      cfg.sweep.seed = cur.seed(s, "sweep", "seed", 12345);
    }
  }

  // malliavin
  {
    const json m = doc.contains("malliavin") ? doc.at("malliavin") : json::object();
    if (cur.check_keys(m, "malliavin", {"stride"})) {
      cfg.malliavin.stride = cur.integer(m, "malliavin", "stride", 4);
      if (cfg.malliavin.stride < 1) cur.fail("malliavin.stride", "must be >= 1");
    }
  }

  // density
  {
    const json d = doc.contains("density") ? doc.at("density") : json::object();
    if (cur.check_keys(d, "density", {"bandwidth"})) {
      cfg.density.bandwidth = cur.number(d, "density", "bandwidth", 0.0);
      if (cfg.density.bandwidth < 0.0) cur.fail("density.bandwidth", "must be >= 0");
    }
  }

  // output
  {
    const json o = doc.contains("output") ? doc.at("output") : json::object();
    if (cur.check_keys(o, "output", {"directory", "formats"})) {
      cfg.output.directory = cur.text(o, "output", "directory", "out");
      if (o.is_object() && o.contains("formats")) {
        const json& fm = o.at("formats");
        if (!fm.is_array()) {
          cur.fail("output.formats", "expected an array");
        } else {
          cfg.output.csv = false;
          cfg.output.json = false;
          for (const auto& v : fm) {
            const std::string s = v.is_string() ? v.get<std::string>() : "";
            if (s == "csv") cfg.output.csv = true;
            else if (s == "json") cfg.output.json = true;
            else cur.fail("output.formats", "entries must be \"csv\" or \"json\"");
          }
        }
      }
    }
  }

  // Derived values that need a valid grid.
  if (errors.empty()) {
    // observation snapping to the nearest node
    const Grid& g = cfg.grid;
    int xi = static_cast<int>(std::lround(cfg.observation.x0 * g.nx));
    xi = std::clamp(xi, 1, g.nx - 1);
    cfg.observation.x0_index = xi;
    cfg.observation.x0_snap_distance = std::abs(g.x(xi) - cfg.observation.x0);
    int ti = static_cast<int>(std::lround(cfg.observation.t0 / g.T * g.nt));
    ti = std::clamp(ti, 1, g.nt);
    cfg.observation.t0_index = ti;
    cfg.observation.t0_snap_distance = std::abs(g.t(ti) - cfg.observation.t0);

    // measured coefficient bounds over the wall band
    if (!have_L || !have_M) {
      const Matrix lo = wall_lattice(cfg.walls.lower, g);
      const Matrix hi = wall_lattice(cfg.walls.upper, g);
      double band_lo = lo.data()[0], band_hi = hi.data()[0];
      for (double v : lo.data()) band_lo = std::min(band_lo, v);
      for (double v : hi.data()) band_hi = std::max(band_hi, v);
      if (band_hi > band_lo) {
        double max_deriv = 0.0, max_sigma = 0.0;
        measured_bounds(cfg.coeffs, band_lo, band_hi, max_deriv, max_sigma);
        if (!have_L) cfg.coeffs.lipschitz = max_deriv;
        if (!have_M) cfg.coeffs.sigma_bound = max_sigma;
      }
    }
  }

  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

SolverConfig RunConfig::solver_config() const {
  SolverConfig sc;
  sc.grid = grid;
  sc.walls = walls;
  sc.coeffs = coeffs;
  sc.initial = initial;
  sc.epsilon = epsilon;
  sc.delta = delta;
  sc.penalty = penalty;
  return sc;
}

EnsembleConfig RunConfig::ensemble_config() const {
  EnsembleConfig ec;
  ec.solver = solver_config();
  ec.n_paths = ensemble.n_paths;
  ec.base_seed = ensemble.base_seed;
  ec.x0_index = observation.x0_index;
  ec.t0_index = observation.t0_index;
  ec.a = observation.a;
  ec.b = observation.b;
  return ec;
}

nlohmann::json RunConfig::normalized() const {
  json doc;
  doc["grid"] = {{"nx", grid.nx}, {"nt", grid.nt}, {"T", grid.T}};
  doc["walls"] = {{"lower", wall_to_json(walls.lower)}, {"upper", wall_to_json(walls.upper)}};
  doc["coefficients"] = {{"f", rule_to_json(coeffs.f)},
                         {"sigma", rule_to_json(coeffs.sigma)},
                         {"L", coeffs.lipschitz},
                         {"M_sigma", coeffs.sigma_bound},
                         {"sigma_min", coeffs.sigma_min}};
  doc["penalty"] = {{"variant", penalty == PenaltyKind::Hard ? "hard" : "smooth"},
                    {"epsilon", epsilon},
                    {"delta", delta}};
  if (initial.kind == InitialProfile::Kind::Sine) {
    doc["initial"] = {{"kind", "sine"}, {"amplitude", initial.amplitude}, {"mode", initial.mode}};
  } else {
    doc["initial"] = {{"kind", "zero"}};
  }
  doc["observation"] = {{"x0", observation.x0},
                        {"t0", observation.t0},
                        {"a", observation.a},
                        {"b", observation.b}};
  doc["ensemble"] = {{"N", ensemble.n_paths}, {"base_seed", ensemble.base_seed}};
  doc["sweep"] = {{"epsilons", sweep.epsilons}, {"deltas", sweep.deltas}, {"seed", sweep.seed}};
  doc["malliavin"] = {{"stride", malliavin.stride}};
  doc["density"] = {{"bandwidth", density.bandwidth}};
  json formats = json::array();
  if (output.csv) formats.push_back("csv");
  if (output.json) formats.push_back("json");
  doc["output"] = {{"directory", output.directory}, {"formats", formats}};
  return doc;
}

}  // namespace respde
