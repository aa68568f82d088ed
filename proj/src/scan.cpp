#include "pvisit/scan.hpp"

#include <chrono>
#include <filesystem>
#include <limits>

#include "pvisit/errors.hpp"
#include "pvisit/io.hpp"
#include "pvisit/numeric.hpp"
#include "pvisit/parallel.hpp"

namespace pvisit {

namespace {

enum : std::uint64_t { kStreamCenters = 0x63656e74ULL, kStreamMeasure = 1, kStreamVisits = 2 };

void evaluate_bounds(const ExperimentConfig& config, const VisitSample& sample, ScanRow& row) {
  const std::size_t N = sample.N_used + 1;
  if (sample.series.empty()) {
    row.bound_note = "window longer than bound.max_window";
    return;
  }
  const double eps = sample.eps_hat.value;
  for (std::size_t p : config.bound.p) {
    if (!(p >= 2 && p < N)) continue;
    const McEstimate r2 = estimate_r2_mc(sample.series, p);
    std::optional<McEstimate> r1;
    for (std::size_t M : config.bound.M) {
      if (!(M >= 1 && M + 1 <= N)) continue;
      const BoundInputs in{std::min(1.0, eps), N, p, M};
      if (!r1) r1 = estimate_r1_mc(sample.series, in, default_r1_grid(in));
      BoundGridEntry entry{p, M, *r1, r2,
                           assemble_total(r1->value, r2.value, in, Provenance::monte_carlo, Provenance::monte_carlo)};
      row.bounds.push_back(entry);
      if (!row.best_bound || entry.breakdown.total < row.bounds[*row.best_bound].breakdown.total)
        row.best_bound = row.bounds.size() - 1;
    }
  }
  if (row.bounds.empty()) row.bound_note = "no admissible (p, M) in the grid";
}

void run_row(const ExperimentConfig& config, const System& system, ScanRow& row) {
  const auto started = std::chrono::steady_clock::now();
  const BallTarget target{row.center, row.radius};
  try {
    row.bad = detect_bad_center(system, target);
    row.eps = estimate_measure(system, target, config.measure_iterations, derive_seed(row.row_seed, kStreamMeasure));
    VisitSamplingOptions opts;
    opts.eps_hat = row.eps;
    const double window = std::floor(config.t / row.eps.value) + 1.0;
    if (window <= static_cast<double>(config.bound.max_window)) opts.keep_series = config.bound.max_series;
    const VisitSample sample = sample_visit_counts(system, target, config.t, config.n_samples, config.gap,
                                                   derive_seed(row.row_seed, kStreamVisits), opts);
    row.N_used = sample.N_used;
    row.n_samples = sample.n_samples;
    row.low_sample_warning = sample.low_sample_warning;
    row.empirical = sample.empirical;
    row.escapes = sample.escapes + row.eps.escapes;
    row.tv_to_poisson = tv_distance(sample.empirical, poisson_pmf(config.t));
    evaluate_bounds(config, sample, row);
  } catch (const EmptyBallError&) {
    row.skipped = true;
    row.skip_reason = "empty ball";
  }
  row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
}

std::string csv_double(double v) { return std::isnan(v) ? "" : format_double(v); }

std::string pmf_file_name(const std::string& path) { return path + ".pmfs.json"; }

}  // namespace

std::vector<Point> scan_centers(const ExperimentConfig& config, const System& system) {
  std::vector<Point> centers;
  for (const auto& c : config.centers) centers.push_back(system.canonical(c));
  if (config.sampled_centers > 0) {
    for (auto& p : sample_orbit_points(system, config.sampled_centers, config.center_spacing,
                                       derive_seed(config.seed, kStreamCenters)))
      centers.push_back(std::move(p));
  }
  if (centers.empty() && !system.has_geometry()) centers.emplace_back(Eigen::VectorXd(0));
  return centers;
}

ScanResult run_scan(const ExperimentConfig& config, unsigned workers, std::optional<std::size_t> only_row) {
  const System system = config_system(config);
  ScanResult result;
  result.config = config;
  result.centers = scan_centers(config, system);
  for (std::size_t c = 0; c < result.centers.size(); ++c)
    for (std::size_t r = 0; r < config.radii.size(); ++r) {
      ScanRow row;
      row.row = c * config.radii.size() + r;
      row.center_index = c;
      row.radius_index = r;
      row.center = result.centers[c];
      row.radius = config.radii[r];
      row.row_seed = derive_seed(config.seed, c, r);
      if (!only_row || *only_row == row.row) result.rows.push_back(std::move(row));
    }
  if (only_row && result.rows.empty()) throw std::invalid_argument("run_scan: row index out of range");
  parallel_for(result.rows.size(), workers, [&](std::size_t i) { run_row(config, system, result.rows[i]); });
  return result;
}

std::string scan_csv_header() {
  return "row,center,radius,status,eps_hat,eps_se,N_used,n_samples,low_samples,tv_to_poisson,bad_center,"
         "first_bad_k,bad_margin,bad_horizon,best_p,best_M,r1,r1_se,r2,r2_se,r3,bound_total,bound_note,escapes,"
         "pmf_ref,config_hash,seed\n";
}

std::string scan_csv_row(const ScanResult& result, const ScanRow& row) {
  std::string s = std::to_string(row.row) + "," + point_to_text(row.center, ';') + "," + format_double(row.radius) + ",";
  if (row.skipped) {
    s += "skipped:" + row.skip_reason + ",,,,,,,,,,,,,,,,,,,,,";
  } else {
    s += "ok," + format_double(row.eps.value) + "," + format_double(row.eps.std_error) + "," +
         std::to_string(row.N_used) + "," + std::to_string(row.n_samples) + "," +
         (row.low_sample_warning ? "1" : "0") + "," + format_double(row.tv_to_poisson) + "," +
         (row.bad.flagged ? "1" : "0") + "," + std::to_string(row.bad.first_bad_k) + "," +
         csv_double(row.bad.margin) + "," + std::to_string(row.bad.horizon) + ",";
    if (row.best_bound) {
      const auto& b = row.bounds[*row.best_bound];
      s += std::to_string(b.p) + "," + std::to_string(b.M) + "," + csv_double(b.r1.value) + "," +
           csv_double(b.r1.std_error) + "," + csv_double(b.r2.value) + "," + csv_double(b.r2.std_error) + "," +
           csv_double(b.breakdown.r3) + "," + csv_double(b.breakdown.total) + ",";
    } else {
      s += ",,,,,,,,";
    }
    s += row.bound_note + "," + std::to_string(row.escapes) + ",";
    s += std::filesystem::path(pmf_file_name(result.config.output_path)).filename().string() + "#" +
         std::to_string(row.row);
  }
  s += "," + result.config.hash + "," + std::to_string(result.config.seed) + "\n";
  return s;
}

std::string scan_rows_csv(const ScanResult& result) {
  std::string out = scan_csv_header();
  for (const auto& row : result.rows) out += scan_csv_row(result, row);
  return out;
}

std::string scan_bounds_csv(const ScanResult& result) {
  std::string out = "row,p,M,r1,r1_se,r2,r2_se,r3,total,r1_provenance,r2_provenance,r1_lower_bound\n";
  for (const auto& row : result.rows)
    for (const auto& b : row.bounds)
      out += std::to_string(row.row) + "," + std::to_string(b.p) + "," + std::to_string(b.M) + "," +
             csv_double(b.r1.value) + "," + csv_double(b.r1.std_error) + "," + csv_double(b.r2.value) + "," +
             csv_double(b.r2.std_error) + "," + csv_double(b.breakdown.r3) + "," + csv_double(b.breakdown.total) +
             "," + std::string(to_string(b.breakdown.r1_provenance)) + "," +
             std::string(to_string(b.breakdown.r2_provenance)) + "," + (b.r1.lower_bound ? "1" : "0") + "\n";
  return out;
}

std::string scan_pmfs_json(const ScanResult& result) {
  std::string out = "{\"config_hash\": \"" + result.config.hash + "\", \"seed\": " + std::to_string(result.config.seed) +
                    ", \"rows\": [";
  bool first = true;
  for (const auto& row : result.rows) {
    if (row.skipped) continue;
    out += std::string(first ? "\n" : ",\n") + "  {\"row\": " + std::to_string(row.row) +
           ", \"pmf\": " + pmf_to_json(row.empirical) + "}";
    first = false;
  }
  return out + "\n]}\n";
}

void write_scan_outputs(const ScanResult& result, const std::string& path) {
  write_text_file(path, scan_rows_csv(result));
  write_text_file(path + ".bounds.csv", scan_bounds_csv(result));
  write_text_file(pmf_file_name(path), scan_pmfs_json(result));
}

}  // namespace pvisit
