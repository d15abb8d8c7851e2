#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "respde/config.hpp"
#include "respde/variation.hpp"

namespace respde {

struct RunOptions {
  std::optional<std::uint64_t> seed;  // trajectory seed override (solve, malliavin)
  std::optional<SourceCell> source;   // malliavin source cell override
  int threads = 1;                    // density ensemble workers
};

// report is the machine-readable run summary printed to stdout. It carries
// wall-clock timings; the files written under output.directory never do, so
// repeated runs of one configuration are byte-identical on disk.
struct RunResult {
  nlohmann::json report;
  int exit_code = 0;
};

RunResult run_validate(const RunConfig& cfg);
RunResult run_solve(const RunConfig& cfg, const RunOptions& opts);
RunResult run_sweep(const RunConfig& cfg);
RunResult run_malliavin(const RunConfig& cfg, const RunOptions& opts);
RunResult run_density(const RunConfig& cfg, const RunOptions& opts);

// Dispatch by subcommand name; throws std::invalid_argument for unknown names.
RunResult run_subcommand(const std::string& name, const RunConfig& cfg, const RunOptions& opts);

}  // namespace respde
