#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "respde/density.hpp"
#include "respde/solver.hpp"

namespace respde {

// All parse/validation problems of one document, each naming the offending
// key path.
struct ConfigError : std::runtime_error {
  explicit ConfigError(std::vector<std::string> errs);
  std::vector<std::string> errors;
};

struct ObservationSettings {
  double x0 = 0.5;   // as requested (pre-snap)
  double t0 = -1.0;  // -1 means "default to T"
  double a = 0.05;
  double b = 0.05;
  int x0_index = 0;  // snapped node
  int t0_index = 0;
  double x0_snap_distance = 0.0;
  double t0_snap_distance = 0.0;
};

struct EnsembleSettings {
  int n_paths = 1000;
  std::uint64_t base_seed = 12345;
};

struct SweepSettings {
  std::vector<double> epsilons{0.1, 0.05};
  std::vector<double> deltas{0.01, 0.005, 0.0025};
  std::uint64_t seed = 12345;
};

struct MalliavinSettings {
  int stride = 4;
};

struct DensitySettings {
  double bandwidth = 0.0;  // 0 selects Silverman's rule
};

struct OutputSettings {
  std::string directory = "out";
  bool csv = true;
  bool json = true;
};

// One parsed and validated configuration document. grid/walls/coefficients
// are required in the input; everything else has documented defaults. The
// declared coefficient bounds L and M_sigma default to the measured maxima
// of the catalog rules over the wall band.
struct RunConfig {
  Grid grid;
  WallPair walls;
  CoefficientSet coeffs;
  InitialProfile initial;
  PenaltyKind penalty = PenaltyKind::Hard;
  double epsilon = 0.1;
  double delta = 0.1;
  ObservationSettings observation;
  EnsembleSettings ensemble;
  SweepSettings sweep;
  MalliavinSettings malliavin;
  DensitySettings density;
  OutputSettings output;

  SolverConfig solver_config() const;
  EnsembleConfig ensemble_config() const;

  // Full echo with every default materialised. Parsing the echo yields an
  // identical configuration (and identical echo).
  nlohmann::json normalized() const;
};

// Parses a JSON text document. Unknown keys anywhere are rejected; all
// errors are collected and thrown together as ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_json(const nlohmann::json& doc);

}  // namespace respde
