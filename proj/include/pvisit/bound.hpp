#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "pvisit/hit_series.hpp"

namespace pvisit {

/// Parameters of the Poisson approximation bound for a stationary binary
/// process: eps = P(X_1 = 1), window length N, gap p, truncation level M.
struct BoundInputs {
  double eps = 0.0;
  std::size_t N = 0;
  std::size_t p = 0;
  std::size_t M = 0;

  /// Throws std::invalid_argument unless eps in [0,1], 2 <= p < N and 1 <= M <= N - 1.
  void validate() const;
};

enum class Provenance { exact, iid_analytic, monte_carlo };
std::string_view to_string(Provenance p);

struct BoundBreakdown {
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;
  double total = 0.0;
  Provenance r1_provenance = Provenance::exact;
  Provenance r2_provenance = Provenance::exact;
};

struct CorrelationTerms {
  double r1 = 0.0;
  double r2 = 0.0;
};

/// Monte-Carlo estimate with a jackknife standard error. `lower_bound` marks
/// estimates of a supremum taken over a finite grid.
struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  bool lower_bound = false;
};

/// 4 (M p eps (1 + N eps) + (eps N)^M e^{-N eps} / M! + N eps^2).
double r3_term(const BoundInputs& in);

/// total = 2 N M (r1 + r2) + r3_term(in).
BoundBreakdown assemble_total(double r1, double r2, const BoundInputs& in,
                              Provenance r1_provenance = Provenance::exact,
                              Provenance r2_provenance = Provenance::exact);

/// Correlation terms of an i.i.d. Bernoulli(eps) process: r1 = 0, r2 = (p - 1) eps^2.
CorrelationTerms iid_terms(const BoundInputs& in);

/// (j, q) points at which the short-correlation supremum is sampled.
struct R1Grid {
  std::vector<std::pair<std::size_t, std::size_t>> points;
};

/// j over multiples of ceil((N - p) / 16) in [0, N - p], q <= min(N - j - p, 4 ceil(N eps) + 8).
R1Grid default_r1_grid(const BoundInputs& in);

/// Every admissible (j, q).
R1Grid full_r1_grid(const BoundInputs& in);

/// Sum over l in [1, p-1] of E[X_1 X_{l+1}], pooled over all time origins of
/// all series. Standard error by delete-a-group jackknife over series.
McEstimate estimate_r2_mc(std::span<const HitSeries> series, std::size_t p);

/// Max over the grid of |E[X_1 1{S = q}] - eps E[1{S = q}]| with
/// S = X_{p+1} + ... + X_{N-j}, estimated over every length-N window of every
/// series. eps is the sample frequency of X_1 on the same windows. The result
/// is flagged as a lower bound of the true supremum.
McEstimate estimate_r1_mc(std::span<const HitSeries> series, const BoundInputs& in, const R1Grid& grid);

}  // namespace pvisit
