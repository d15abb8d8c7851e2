#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "respde/density.hpp"
#include "respde/grid.hpp"
#include "respde/matrix.hpp"

namespace respde {

// FNV-1a, 64-bit. Used to fingerprint written artifacts in run reports.
std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

// Shortest decimal rendering that round-trips a double ("%.17g" width,
// trimmed by the printf library itself). Shared by every writer so equal
// runs produce byte-equal files.
std::string format_double(double v);

struct FileRecord {
  std::string name;
  std::uint64_t bytes = 0;
  std::string fnv1a64;
};

// Lattice matrix as CSV: header "t,<name>_0,...,<name>_{cols-1}", one row per
// matrix row with leading time column t(first_time_index + r).
std::string lattice_csv(const Matrix& m, const Grid& grid, std::string_view value_name,
                        int first_time_index = 0);

// path,seed,value,in_event rows; seeds rederived from samples.base_seed.
std::string samples_csv(const SampleSet& samples);

// point,density rows plus the bandwidth and mass in the header comment.
std::string density_csv(const DensityEstimate& estimate);

// Creates dir if needed, writes content, returns name/size/checksum.
FileRecord write_file(const std::filesystem::path& dir, std::string_view name,
                      std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace respde
