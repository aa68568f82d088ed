#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pvisit/errors.hpp"
#include "pvisit/numeric.hpp"
#include "pvisit/sampling.hpp"
#include "pvisit/system.hpp"

using namespace pvisit;

namespace {

Point pt(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

}  // namespace

TEST_CASE("cat map ball measure is the disk area") {
  const System cat = cat_map();
  const MeasureEstimate m = estimate_measure(cat, {pt(0.4, 0.7), 0.1}, 10'000'000, 42);
  CHECK(std::abs(m.value - std::numbers::pi * 0.01) <= 3 * m.std_error);
  CHECK(m.std_error > 0.0);
  CHECK(m.iterations >= 10'000'000);
}

TEST_CASE("covering ball has measure one") {
  const MeasureEstimate m = estimate_measure(cat_map(), {pt(0.3, 0.3), 0.75}, 100'000, 1);
  CHECK(m.value == 1.0);
}

TEST_CASE("measure preconditions") {
  CHECK_THROWS_AS(estimate_measure(cat_map(), {pt(0.3, 0.3), 0.1}, 9999, 1), std::invalid_argument);
  CHECK_THROWS_AS(estimate_measure(cat_map(), {pt(0.3, 0.3), 1e-9}, 10000, 1), EmptyBallError);
}

TEST_CASE("henon ball at an attractor point has positive measure") {
  const System h = henon_map();
  const Point x = iterate(h, pt(0, 0), 5000);
  const MeasureEstimate m = estimate_measure(h, {x, 0.05}, 1'000'000, 3);
  CHECK(m.value > 0.0);
  CHECK(m.std_error > 0.0);
  CHECK(m.std_error < m.value);
}

TEST_CASE("annulus measures") {
  const System cat = cat_map();
  CHECK(annulus_measure(cat, pt(0.5, 0.5), 0.1, 0.1, 10000, 1).value == 0.0);
  const auto [lo, hi] = corona_radii(0.1, 2.0);
  CHECK(lo == doctest::Approx(0.09));
  CHECK(hi == 0.1);
  const MeasureEstimate a = annulus_measure(cat, pt(0.5, 0.5), lo, hi, 10'000'000, 8);
  CHECK(std::abs(a.value - 0.0059690260418206071531) <= 3 * a.std_error);
  CHECK_THROWS_AS(annulus_measure(cat, pt(0.5, 0.5), 0.2, 0.1, 10000, 1), std::invalid_argument);

  const System h = henon_map();
  const Point x = iterate(h, pt(0, 0), 5000);
  const auto [clo, chi] = corona_radii(0.05, 1.5);
  const double corona = annulus_measure(h, x, clo, chi, 1'000'000, 4).value;
  const double ball = estimate_measure(h, {x, 0.05}, 1'000'000, 4).value;
  CHECK(corona < ball);

  const auto [alo, ahi] = alpha_corona_radii(0.1, 0.5, 3);
  CHECK(alo == 0.0);
  CHECK(ahi == doctest::Approx(0.225));
}

TEST_CASE("orbit hits at a fixed point and for tiny balls") {
  const System cat = cat_map();
  const HitSeries ones = orbit_hits(cat, {pt(0, 0), 0.01}, pt(0, 0), 50, 1);
  CHECK(ones.count() == 50);
  const HitSeries zeros = orbit_hits(cat, {pt(0.3, 0.6), 1e-15}, pt(0.1234, 0.5678), 1000, 1);
  CHECK(zeros.count() == 0);
  CHECK(zeros.size() == 1000);
}

TEST_CASE("iid adapter reproduces the binomial law") {
  const System iid = iid_process(0.01);
  VisitSamplingOptions opts;
  opts.measure_iterations = 2'000'000;
  const VisitSample s = sample_visit_counts(iid, {Point(0), 0.5}, 1.0, 1'000'000, 0, 77, opts);
  CHECK(s.n_samples == 1'000'000);
  CHECK(tv_distance(s.empirical, binomial_pmf(100, 0.01)) <= 0.01);
  CHECK_FALSE(s.low_sample_warning);
}

TEST_CASE("all-hit adapter gives a point mass") {
  const System all = iid_process(1.0);
  const VisitSample s = sample_visit_counts(all, {Point(0), 0.5}, 5.0, 50, 3, 1);
  CHECK(s.N_used == 5);
  CHECK(s.empirical.at(6) == 1.0);
  CHECK(s.low_sample_warning);
}

TEST_CASE("sampling is independent of the worker count") {
  for (const System& sys : {cat_map(), henon_map()}) {
    const Point c = sys.kind() == SystemKind::cat ? pt(0.3, 0.6) : iterate(sys, pt(0, 0), 3000);
    const BallTarget target{c, 0.08};
    VisitSamplingOptions one, four;
    one.measure_iterations = four.measure_iterations = 200'000;
    one.keep_series = four.keep_series = 10;
    four.workers = 4;
    const VisitSample a = sample_visit_counts(sys, target, 1.0, 3000, 64, 9, one);
    const VisitSample b = sample_visit_counts(sys, target, 1.0, 3000, 64, 9, four);
    CHECK(a.counts == b.counts);
    CHECK(a.eps_hat.value == b.eps_hat.value);
    REQUIRE(a.series.size() == 10);
    CHECK(a.series[7].bits == b.series[7].bits);
    const VisitSample c2 = sample_visit_counts(sys, target, 1.0, 3000, 64, 10, one);
    CHECK(a.counts != c2.counts);
  }
}

TEST_CASE("orbit points") {
  const auto pts = sample_orbit_points(cat_map(), 5, 100, 3);
  REQUIRE(pts.size() == 5);
  const auto again = sample_orbit_points(cat_map(), 5, 100, 3);
  for (std::size_t i = 0; i < 5; ++i) CHECK(pts[i] == again[i]);
  CHECK(pts[0] != pts[1]);
}

TEST_CASE("hit series are reproducible") {
  const System h = henon_map();
  const Point x = iterate(h, pt(0, 0), 4000);
  const HitSeries a = orbit_hits(h, {x, 0.1}, iterate(h, pt(0, 0), 1234), 5000, 8);
  const HitSeries b = orbit_hits(h, {x, 0.1}, iterate(h, pt(0, 0), 1234), 5000, 8);
  CHECK(a.bits == b.bits);
  CHECK(a.count() > 0);
}

TEST_CASE("cat map: preimage of a ball has the ball's measure") {
  const System cat = cat_map();
  const BallTarget ball{pt(0.2, 0.9), 0.1};
  Rng rng(77);
  const int n = 2'000'000;
  int inside = 0;
  for (int i = 0; i < n; ++i) {
    const Point y = pt(rng.uniform(), rng.uniform());
    inside += cat.distance(cat.map(y), ball.center) <= ball.radius;
  }
  const double frac = inside / double(n);
  const MeasureEstimate m = estimate_measure(cat, ball, 10'000'000, 6);
  const double se = std::hypot(std::sqrt(frac * (1 - frac) / n), m.std_error);
  CHECK(std::abs(frac - m.value) <= 3 * se);
}

TEST_CASE("iid adapter: distance to the binomial shrinks with the sample size") {
  const System iid = iid_process(0.05);
  auto tv_at = [&](std::size_t n, std::uint64_t seed) {
    VisitSamplingOptions opts;
    opts.eps_hat = MeasureEstimate{0.05, 0.0, 0, 0};
    const VisitSample s = sample_visit_counts(iid, {Point(0), 0.5}, 1.0, n, 0, seed, opts);
    return tv_distance(s.empirical, binomial_pmf(s.N_used + 1, 0.05));
  };
  double prev = 1.0;
  for (std::size_t n : {10'000, 100'000, 1'000'000}) {
    double sum = 0.0, sum2 = 0.0;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      const double v = tv_at(n, seed);
      sum += v;
      sum2 += v * v;
    }
    const double mean = sum / 4, sd = std::sqrt(std::max(0.0, (sum2 - 4 * mean * mean) / 3));
    CHECK(mean <= prev + 2 * sd);
    prev = mean;
  }
}
