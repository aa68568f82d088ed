#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "pvisit/config.hpp"
#include "pvisit/errors.hpp"
#include "pvisit/io.hpp"
#include "pvisit/scan.hpp"

using namespace pvisit;

namespace {

const char* kCatConfig = R"(schema: 1
seed: 20240611
system: cat
targets:
  centers: [[0.0, 0.0], [0.37, 0.52]]
  sampled: 2
radii: [0.1, 0.05]
t: 1.0
n_samples: 4000
gap: 256
measure_iterations: 1000000
bound:
  p: [2, 3]
  M: [1, 2, 4]
  max_series: 1000
output:
  path: scan_test_cat.csv
)";

std::string iid_config(std::uint64_t seed) {
  return "schema: 1\nseed: " + std::to_string(seed) +
         "\nsystem: iid:0.01\nradii: [0.5]\nt: 1\nn_samples: 1000000\ngap: 0\n"
         "measure_iterations: 10000000\nbound: {p: [2], M: [2], max_series: 2000}\noutput: {path: iid.csv}\n";
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(kCatConfig);
  CHECK(c.seed == 20240611);
  CHECK(c.centers.size() == 2);
  CHECK(c.sampled_centers == 2);
  CHECK(c.radii == std::vector<double>{0.1, 0.05});
  CHECK(c.bound.M == std::vector<std::size_t>{1, 2, 4});
  CHECK(c.hash.size() == 16);
  CHECK(parse_config(kCatConfig).hash == c.hash);
}

TEST_CASE("config rejections") {
  const std::string base = "schema: 1\nseed: 1\nsystem: cat\ntargets: {centers: [[0.1, 0.2]]}\nn_samples: 10\noutput: {path: x.csv}\n";
  CHECK_NOTHROW(parse_config(base + "radii: [0.1]\n"));
  CHECK_THROWS_AS(parse_config(base + "radii: []\n"), ValidationError);
  CHECK_THROWS_AS(parse_config(base + "radii: [0.1, 0.2]\n"), ValidationError);
  CHECK_THROWS_AS(parse_config(base + "radii: [1.5]\n"), ValidationError);
  CHECK_THROWS_AS(parse_config(base + "radii: [0.1]\ncolour: red\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("schema: 1\nsystem: cat\nradii: [0.1]\nn_samples: 10\noutput: {path: x.csv}\n"),
                  ValidationError);
  CHECK_THROWS_AS(parse_config("schema: 2\nseed: 1\nsystem: cat\nradii: [0.1]\nn_samples: 10\noutput: {path: x}\n"),
                  ValidationError);
  CHECK_THROWS_AS(parse_config("schema: 1\nseed: 1\nsystem: warp\ntargets: {sampled: 2}\nradii: [0.1]\n"
                               "n_samples: 10\noutput: {path: x}\n"),
                  ValidationError);
  CHECK_THROWS_AS(parse_config("schema: 1\nseed: 1\nsystem: cat\nradii: [0.1]\nn_samples: 10\noutput: {path: x}\n"),
                  ValidationError);
  CHECK_THROWS_AS(parse_config("schema: [1\n"), ValidationError);
}

TEST_CASE("scan output is independent of worker count and reproducible per row") {
  const ExperimentConfig c = parse_config(kCatConfig);
  const ScanResult one = run_scan(c, 1);
  const ScanResult four = run_scan(c, 4);
  REQUIRE(one.rows.size() == 8);
  CHECK(scan_rows_csv(one) == scan_rows_csv(four));
  CHECK(scan_bounds_csv(one) == scan_bounds_csv(four));
  CHECK(scan_pmfs_json(one) == scan_pmfs_json(four));

  const ScanResult single = run_scan(c, 1, 5);
  REQUIRE(single.rows.size() == 1);
  CHECK(scan_csv_row(single, single.rows[0]) == scan_csv_row(one, one.rows[5]));

  for (const auto& row : one.rows) {
    CHECK_FALSE(row.skipped);
    CHECK(row.tv_to_poisson >= 0.0);
    CHECK(row.tv_to_poisson <= 1.0);
    CHECK(row.best_bound.has_value());
  }
  // row 0 is the fixed point at r = 0.1: empty k-range, so unflagged with a note
  CHECK_FALSE(one.rows[0].bad.flagged);
  CHECK_FALSE(one.rows[0].bad.note.empty());

  write_scan_outputs(one, "scan_test_cat.csv");
  const std::string csv = read_text_file("scan_test_cat.csv");
  CHECK(csv.starts_with(scan_csv_header()));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
  CHECK(csv.find(c.hash) != std::string::npos);
  const std::string pmfs = read_text_file("scan_test_cat.csv.pmfs.json");
  CHECK(pmfs.find("\"row\": 7") != std::string::npos);
}

TEST_CASE("empty-ball rows are skipped with a reason") {
  const std::string cfg = "schema: 1\nseed: 3\nsystem: cat\ntargets: {centers: [[0.3, 0.3]]}\nradii: [1e-7]\n"
                          "n_samples: 100\nmeasure_iterations: 10000\noutput: {path: x.csv}\n";
  const ScanResult r = run_scan(parse_config(cfg), 1);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].skipped);
  CHECK(scan_csv_row(r, r.rows[0]).find("skipped:empty ball") != std::string::npos);
}

TEST_CASE("iid adapter scan matches the exact binomial distance") {
  std::vector<double> tvs;
  std::size_t N_used = 0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const ScanResult r = run_scan(parse_config(iid_config(seed)), 1);
    REQUIRE(r.rows.size() == 1);
    tvs.push_back(r.rows[0].tv_to_poisson);
    N_used = r.rows[0].N_used;
  }
  const double mean = std::accumulate(tvs.begin(), tvs.end(), 0.0) / tvs.size();
  double var = 0.0;
  for (double v : tvs) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / (tvs.size() - 1));
  const double exact = tv_distance(binomial_pmf(N_used + 1, 0.01), poisson_pmf(1.0));
  CHECK(std::abs(tvs[0] - exact) <= 3 * sd + 1e-4);
  CHECK(std::abs(exact - 0.0027752947174266765925) < 5e-4);
}
