#include "respde/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "respde/rng.hpp"

namespace respde {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string fnv1a64_hex(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string lattice_csv(const Matrix& m, const Grid& grid, std::string_view value_name,
                        int first_time_index) {
  std::string out;
  out.reserve(m.rows() * m.cols() * 20 + 64);
  out += "t";
  for (std::size_t c = 0; c < m.cols(); ++c) {
    out += ',';
    out += value_name;
    out += '_';
    out += std::to_string(c);
  }
  out += '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out += format_double(grid.t(first_time_index + static_cast<int>(r)));
    for (double v : m.row(r)) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::string samples_csv(const SampleSet& samples) {
  std::string out = "path,seed,value,in_event\n";
  out.reserve(out.size() + samples.values.size() * 48);
  for (std::size_t p = 0; p < samples.values.size(); ++p) {
    out += std::to_string(p);
    out += ',';
    out += std::to_string(derive_seed(samples.base_seed, p));
    out += ',';
    out += format_double(samples.values[p]);
    out += ',';
    out += samples.in_event[p] ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string density_csv(const DensityEstimate& estimate) {
  std::string out = "# bandwidth=" + format_double(estimate.bandwidth) +
                    " integral=" + format_double(estimate.integral) + "\n";
  out += "point,density\n";
  for (std::size_t k = 0; k < estimate.points.size(); ++k) {
    out += format_double(estimate.points[k]);
    out += ',';
    out += format_double(estimate.density[k]);
    out += '\n';
  }
  return out;
}

FileRecord write_file(const std::filesystem::path& dir, std::string_view name,
                      std::string_view content) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path path = dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw std::runtime_error("write failed: " + path.string());
  return {std::string(name), content.size(), fnv1a64_hex(content)};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

}  // namespace respde
