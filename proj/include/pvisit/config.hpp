#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pvisit/system.hpp"

namespace pvisit {

inline constexpr int kConfigSchemaVersion = 1;

struct BoundGridConfig {
  std::vector<std::size_t> p{2, 3, 4, 6, 8};
  std::vector<std::size_t> M{1, 2, 3, 4, 6, 8};
  /// Windows kept per row for the Monte-Carlo correlation terms.
  std::size_t max_series = 20000;
  /// Rows whose window is longer than this skip the bound grid.
  std::size_t max_window = 4096;
};

/// One experiment: every center is crossed with every radius.
struct ExperimentConfig {
  int schema = kConfigSchemaVersion;
  std::string system = "cat";
  SystemOverrides overrides;
  std::vector<Point> centers;
  std::size_t sampled_centers = 0;
  std::uint64_t center_spacing = 1000;
  std::vector<double> radii;
  double t = 1.0;
  std::size_t n_samples = 0;
  std::uint64_t gap = 1024;
  std::uint64_t seed = 0;
  std::uint64_t measure_iterations = 10'000'000;
  BoundGridConfig bound;
  std::string output_path;
  std::string output_format = "csv";

  /// FNV-1a of the source text, as 16 hex digits.
  std::string hash;
  /// Directory of the config file; relative model paths resolve against it.
  std::string base_dir;
};

/// Parses and validates a YAML config. Unknown keys, a missing seed, an empty
/// or non-decreasing radii list, or radii outside (0, 1) throw ValidationError.
ExperimentConfig parse_config(const std::string& yaml_text, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

/// System named by the config with its overrides applied.
System config_system(const ExperimentConfig& config);

}  // namespace pvisit
