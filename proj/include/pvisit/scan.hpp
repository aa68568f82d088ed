#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pvisit/bad_center.hpp"
#include "pvisit/bound.hpp"
#include "pvisit/config.hpp"
#include "pvisit/pmf.hpp"
#include "pvisit/sampling.hpp"

namespace pvisit {

struct BoundGridEntry {
  std::size_t p = 0;
  std::size_t M = 0;
  McEstimate r1;
  McEstimate r2;
  BoundBreakdown breakdown;
};

/// One (center, radius) row of a scan.
struct ScanRow {
  std::size_t row = 0;
  std::size_t center_index = 0;
  std::size_t radius_index = 0;
  Point center;
  double radius = 0.0;
  std::uint64_t row_seed = 0;

  bool skipped = false;
  std::string skip_reason;

  MeasureEstimate eps;
  std::size_t N_used = 0;
  std::size_t n_samples = 0;
  bool low_sample_warning = false;
  Pmf empirical = Pmf::delta(0);
  double tv_to_poisson = 0.0;
  BadCenterReport bad;
  std::vector<BoundGridEntry> bounds;
  std::optional<std::size_t> best_bound;  ///< index into `bounds` with the smallest total
  std::string bound_note;
  std::uint64_t escapes = 0;
  double wall_seconds = 0.0;  ///< not written to the result files
};

struct ScanResult {
  ExperimentConfig config;
  std::vector<Point> centers;
  std::vector<ScanRow> rows;
};

/// Centers of a config: explicit ones first, then `sampled_centers` points
/// of a seeded orbit. Adapters without centers get one empty placeholder.
std::vector<Point> scan_centers(const ExperimentConfig& config, const System& system);

/// Runs every center x radius row (or just `only_row`) on `workers` threads.
/// Each row derives its own seed from the master seed and its (center,
/// radius) indices, so rows are independent of scheduling and of each other.
ScanResult run_scan(const ExperimentConfig& config, unsigned workers = 1,
                    std::optional<std::size_t> only_row = std::nullopt);

std::string scan_csv_header();
std::string scan_csv_row(const ScanResult& result, const ScanRow& row);
std::string scan_rows_csv(const ScanResult& result);
std::string scan_bounds_csv(const ScanResult& result);
std::string scan_pmfs_json(const ScanResult& result);

/// Writes `path` (rows), `path`.bounds.csv and `path`.pmfs.json.
void write_scan_outputs(const ScanResult& result, const std::string& path);

}  // namespace pvisit
