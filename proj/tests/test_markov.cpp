#include <doctest.h>

#include <cmath>
#include <vector>

#include "model_grid.hpp"
#include "pvisit/errors.hpp"
#include "pvisit/numeric.hpp"
#include "pvisit/markov.hpp"
#include "pvisit/pmf.hpp"
#include "pvisit/sampling.hpp"
#include "pvisit/system.hpp"

using namespace pvisit;

namespace {

MarkovBinaryModel two_state() {
  Eigen::MatrixXd P(2, 2);
  P << 0.9, 0.1, 0.8, 0.2;
  return MarkovBinaryModel(P, {1});
}

}  // namespace

TEST_CASE("stationary law and eps") {
  const auto m = two_state();
  CHECK(m.stationary()(0) == doctest::Approx(8.0 / 9.0).epsilon(1e-13));
  CHECK(m.eps() == doctest::Approx(1.0 / 9.0).epsilon(1e-13));
  Eigen::MatrixXd bad(2, 2);
  bad << 0.9, 0.2, 0.8, 0.2;
  CHECK_THROWS_AS(MarkovBinaryModel(bad, {1}), std::invalid_argument);
  Eigen::RowVectorXd wrong_pi(2);
  wrong_pi << 0.5, 0.5;
  CHECK_THROWS_AS(MarkovBinaryModel(m.transition(), {1}, wrong_pi), std::invalid_argument);
}

TEST_CASE("two-state chain, N = 12, matches brute-force reference") {
  const double ref[] = {0.27894275208,          0.33748629264,          0.22537349928,
                        0.1058053104,           0.0381686256,           0.01102806528,
                        0.0026014459733333333,  0.00050356963555555556, 0.000079425422222222222,
                        9.9896888888888889e-6,  9.5800888888888889e-7,  6.3715555555555556e-8,
                        2.2755555555555556e-9};
  const auto m = two_state();
  const Pmf dp = exact_count_distribution(m, 12);
  const Pmf en = enumerate_count_distribution(m, 12);
  for (std::size_t k = 0; k <= 12; ++k) {
    CHECK(dp.at(k) == doctest::Approx(ref[k]).epsilon(1e-12));
    CHECK(std::abs(dp.at(k) - en.at(k)) <= 1e-12);
  }
}

TEST_CASE("exact correlation terms match brute force") {
  const CorrelationTerms t = exact_correlation_terms(two_state(), 12, 3);
  CHECK(t.r1 == doctest::Approx(9.8765432098765432099e-5).epsilon(1e-11));
  CHECK(t.r2 == doctest::Approx(0.035555555555555555556).epsilon(1e-12));
}

TEST_CASE("hybrid law reference values") {
  const double ref[] = {0.32768, 0.36611160493827160494, 0.20482341106538637403, 0.075919874002946705279,
                        0.020542918593032904876, 0.0041966529492455418381, 0.00064679164761469288218,
                        0.000072872360243187860929, 5.6089010821521109587e-6, 2.6012294873748920388e-7,
                        5.4192280986976917475e-9};
  const auto m = two_state();
  const Pmf h = hybrid_distribution(m, {4, 10, m.eps()});
  for (std::size_t k = 0; k <= 10; ++k) CHECK(h.at(k) == doctest::Approx(ref[k]).epsilon(1e-12));
  CHECK_THROWS_AS(hybrid_distribution(m, {4, 10, 0.2}), std::invalid_argument);
  CHECK(tv_distance(hybrid_distribution(m, {10, 10, m.eps()}), binomial_pmf(10, m.eps())) < 1e-14);
  CHECK(tv_distance(hybrid_distribution(m, {0, 10, m.eps()}), exact_count_distribution(m, 10)) < 1e-14);
}

TEST_CASE("dp agrees with enumeration over the model grid") {
  for (const auto& m : testing::model_grid())
    for (std::size_t N = 1; N <= 12; ++N) {
      const Pmf dp = exact_count_distribution(m, N);
      const Pmf en = enumerate_count_distribution(m, N);
      for (std::size_t k = 0; k <= N; ++k) CHECK(std::abs(dp.at(k) - en.at(k)) <= 1e-12);
    }
}

TEST_CASE("iid chain reduces to binomial") {
  Eigen::RowVectorXd row(3);
  row << 0.7, 0.2, 0.1;
  const auto m = MarkovBinaryModel::iid(row, {2});
  CHECK(tv_distance(exact_count_distribution(m, 40), binomial_pmf(40, 0.1)) < 1e-13);
  const CorrelationTerms t = exact_correlation_terms(m, 40, 4);
  CHECK(t.r1 < 1e-15);
  CHECK(t.r2 == doctest::Approx(3 * 0.01).epsilon(1e-12));
}

TEST_CASE("r2 is nondecreasing in p") {
  for (const auto& m : testing::model_grid()) {
    double prev = 0.0;
    for (std::size_t p = 2; p <= 10; ++p) {
      const double r2 = exact_correlation_terms(m, 32, p).r2;
      CHECK(r2 >= prev - 1e-15);
      prev = r2;
    }
  }
}

TEST_CASE("telescoping identity holds") {
  for (const auto& m : testing::model_grid())
    for (std::size_t N : {1, 5, 20, 64}) {
      const auto res = telescoping_residuals(m, N);
      CHECK(res.size() == N + 1);
      for (double r : res) CHECK(r <= 1e-12);
    }
  CHECK(telescoping_residual(two_state(), 10, 3) <= 1e-13);
}

TEST_CASE("resource guards") {
  const auto m = two_state();
  CHECK_THROWS_AS(exact_count_distribution(m, kMaxDpLength + 1), ResourceLimitError);
  CHECK_THROWS_AS(enumerate_count_distribution(m, 21), ResourceLimitError);
  CHECK_THROWS_AS(exact_count_distribution(m, 0), std::invalid_argument);
}

TEST_CASE("monte carlo correlation terms agree with exact values on a chain") {
  const auto m = two_state();
  const System sys = markov_process(m);
  const BoundInputs in{m.eps(), 24, 3, 2};
  VisitSamplingOptions opts;
  opts.keep_series = 60000;
  opts.eps_hat = MeasureEstimate{m.eps(), 0.0, 0, 0};
  // t chosen so the window N_used + 1 equals 24
  const VisitSample s = sample_visit_counts(sys, BallTarget{Point(0), 0.5}, 23.5 * m.eps(), 60000, 16, 99, opts);
  REQUIRE(s.N_used + 1 == 24);
  const CorrelationTerms exact = exact_correlation_terms(m, 24, 3);
  const McEstimate r2 = estimate_r2_mc(s.series, 3);
  CHECK(std::abs(r2.value - exact.r2) <= 4 * r2.std_error);
  const McEstimate r1 = estimate_r1_mc(s.series, in, full_r1_grid(in));
  // supremum of noisy estimates is biased upward; its size is still set by the noise
  CHECK(r1.value <= exact.r1 + 6 * r1.std_error);
  const Pmf law = exact_count_distribution(m, 24);
  const double tv = tv_distance(s.empirical, law);
  CHECK(tv < 0.02);
}

TEST_CASE("degenerate and small models") {
  Eigen::MatrixXd one(1, 1);
  one << 1.0;
  const MarkovBinaryModel all(one, {0});
  CHECK(exact_count_distribution(all, 5).at(5) == 1.0);
  const CorrelationTerms t = exact_correlation_terms(all, 10, 3);
  CHECK(t.r2 == doctest::Approx(2.0));
  CHECK(t.r1 <= 1e-15);
  const MarkovBinaryModel none(one, {});
  CHECK(enumerate_count_distribution(none, 3).at(0) == 1.0);

  const auto m = two_state();
  const Pmf n1 = exact_count_distribution(m, 1);
  CHECK(n1.at(0) == doctest::Approx(8.0 / 9.0).epsilon(1e-13));
  CHECK(n1.at(1) == doctest::Approx(1.0 / 9.0).epsilon(1e-13));
  const Pmf dp8 = exact_count_distribution(m, 8), en8 = enumerate_count_distribution(m, 8);
  for (std::size_t k = 0; k <= 8; ++k) CHECK(std::abs(dp8.at(k) - en8.at(k)) <= 1e-12);

  Eigen::RowVectorXd row(2);
  row << 0.7, 0.3;
  const Pmf e4 = enumerate_count_distribution(MarkovBinaryModel::iid(row, {1}), 4);
  for (std::size_t k = 0; k <= 4; ++k) CHECK(e4.at(k) == doctest::Approx(binomial_pmf(4, 0.3).at(k)).epsilon(1e-13));
}

TEST_CASE("telescoping example and hybrid envelope") {
  const auto m = two_state();
  const std::size_t N = 64;
  CHECK(telescoping_residual(m, N, static_cast<std::size_t>(std::ceil(N * m.eps()))) <= 1e-10);
  Eigen::RowVectorXd row(2);
  row << 0.6, 0.4;
  for (double r : telescoping_residuals(MarkovBinaryModel::iid(row, {1}), 30)) CHECK(r <= 1e-15);
  for (std::size_t j = 0; j < 20; ++j) {
    const Pmf a = hybrid_distribution(m, {j, 20, m.eps()});
    const Pmf b = hybrid_distribution(m, {j + 1, 20, m.eps()});
    double worst = 0.0;
    for (std::size_t k = 0; k <= 20; ++k) worst = std::max(worst, std::abs(a.at(k) - b.at(k)));
    CHECK(tv_distance(a, b) <= worst * 21 + 1e-15);
  }
}

TEST_CASE("hybrid law agrees with simulation of the hybrid process") {
  const auto m = two_state();
  const System sys = markov_process(m);
  const std::size_t n = 1'000'000;
  std::vector<int> count(11, 0);
  Rng rng(31);
  const Eigen::RowVectorXd& pi = m.stationary();
  for (std::size_t i = 0; i < n; ++i) {
    int k = 0;
    for (int b = 0; b < 4; ++b) k += rng.bernoulli(m.eps());
    int s = rng.uniform() < pi(0) ? 0 : 1;
    for (int t = 0; t < 6; ++t) {
      k += s;
      s = rng.uniform() < m.transition()(s, 0) ? 0 : 1;
    }
    ++count[k];
  }
  const Pmf h = hybrid_distribution(m, {4, 10, m.eps()});
  for (std::size_t k = 0; k <= 10; ++k) {
    const double p = h.at(k);
    const double se = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(count[k] / double(n) - p) <= 4 * se + 1e-12);
  }
}

TEST_CASE("monte carlo r1 matches the exact value at N = 12, p = 3") {
  const auto m = two_state();
  const System sys = markov_process(m);
  Rng rng(5);
  std::vector<HitSeries> series;
  for (std::size_t i = 0; i < 2000; ++i) {
    const double start = rng.uniform() < m.stationary()(0) ? 0.0 : 1.0;
    series.push_back(orbit_hits(sys, BallTarget{Point(0), 0.5}, Point::Constant(1, start), 511, derive_seed(5, i)));
  }
  const BoundInputs in{m.eps(), 12, 3, 2};
  const McEstimate r1 = estimate_r1_mc(series, in, full_r1_grid(in));
  const double exact = exact_correlation_terms(m, 12, 3).r1;
  CHECK(std::abs(r1.value - exact) <= 4 * r1.std_error);
  const McEstimate r2 = estimate_r2_mc(series, 3);
  CHECK(std::abs(r2.value - exact_correlation_terms(m, 12, 3).r2) <= 4 * r2.std_error);
}
