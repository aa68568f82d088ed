#include "pvisit/bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pvisit {

void BoundInputs::validate() const {
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("BoundInputs: eps outside [0, 1]");
  if (!(p >= 2 && p < N)) throw std::invalid_argument("BoundInputs: need 2 <= p < N");
  if (!(M >= 1 && M + 1 <= N)) throw std::invalid_argument("BoundInputs: need 1 <= M <= N - 1");
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::exact: return "exact";
    case Provenance::iid_analytic: return "iid-analytic";
    case Provenance::monte_carlo: return "monte-carlo";
  }
  return "unknown";
}

double r3_term(const BoundInputs& in) {
  in.validate();
  const double n = static_cast<double>(in.N);
  const double m = static_cast<double>(in.M);
  const double p = static_cast<double>(in.p);
  const double mean = in.eps * n;
  double poisson_tail = 0.0;
  if (mean > 0.0) {
    // log((eps N)^M / M!) accumulated term by term.
    double log_term = -mean;
    for (std::size_t i = 1; i <= in.M; ++i) log_term += std::log(mean) - std::log(static_cast<double>(i));
    poisson_tail = std::exp(log_term);
  }
  return 4.0 * (m * p * in.eps * (1.0 + mean) + poisson_tail + n * in.eps * in.eps);
}

BoundBreakdown assemble_total(double r1, double r2, const BoundInputs& in, Provenance r1_provenance,
                              Provenance r2_provenance) {
  if (!(r1 >= 0.0) || !(r2 >= 0.0)) throw std::invalid_argument("assemble_total: r1 and r2 must be >= 0");
  BoundBreakdown out;
  out.r1 = r1;
  out.r2 = r2;
  out.r3 = r3_term(in);
  out.total = 2.0 * static_cast<double>(in.N) * static_cast<double>(in.M) * (r1 + r2) + out.r3;
  out.r1_provenance = r1_provenance;
  out.r2_provenance = r2_provenance;
  return out;
}

CorrelationTerms iid_terms(const BoundInputs& in) {
  in.validate();
  return {0.0, static_cast<double>(in.p - 1) * in.eps * in.eps};
}

R1Grid default_r1_grid(const BoundInputs& in) {
  in.validate();
  const std::size_t span = in.N - in.p;
  const std::size_t step = std::max<std::size_t>(1, (span + 15) / 16);
  const auto q_cap = static_cast<std::size_t>(4.0 * std::ceil(static_cast<double>(in.N) * in.eps) + 8.0);
  R1Grid grid;
  for (std::size_t j = 0; j <= span; j += step)
    for (std::size_t q = 0; q <= std::min(span - j, q_cap); ++q) grid.points.emplace_back(j, q);
  return grid;
}

R1Grid full_r1_grid(const BoundInputs& in) {
  in.validate();
  R1Grid grid;
  for (std::size_t j = 0; j <= in.N - in.p; ++j)
    for (std::size_t q = 0; q <= in.N - j - in.p; ++q) grid.points.emplace_back(j, q);
  return grid;
}

namespace {

constexpr std::size_t kMaxJackknifeGroups = 64;

std::size_t group_count(std::size_t n_series) { return std::min(n_series, kMaxJackknifeGroups); }

std::size_t group_of(std::size_t series_index, std::size_t n_series, std::size_t groups) {
  return series_index * groups / n_series;
}

double jackknife_se(const std::vector<double>& leave_out) {
  const std::size_t g = leave_out.size();
  if (g < 2) return std::numeric_limits<double>::quiet_NaN();
  double mean = 0.0;
  for (double v : leave_out) mean += v;
  mean /= static_cast<double>(g);
  double ss = 0.0;
  for (double v : leave_out) ss += (v - mean) * (v - mean);
  return std::sqrt(static_cast<double>(g - 1) / static_cast<double>(g) * ss);
}

}  // namespace

McEstimate estimate_r2_mc(std::span<const HitSeries> series, std::size_t p) {
  if (series.empty()) throw std::invalid_argument("estimate_r2_mc: no series");
  if (p < 2) throw std::invalid_argument("estimate_r2_mc: p must be >= 2");
  const std::size_t lags = p - 1;
  const std::size_t groups = group_count(series.size());
  // [group][lag] product sums and origin counts
  std::vector<double> num(groups * lags, 0.0), den(groups * lags, 0.0);
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& bits = series[s].bits;
    if (bits.size() < p) throw std::invalid_argument("estimate_r2_mc: series shorter than p");
    const std::size_t g = group_of(s, series.size(), groups);
    for (std::size_t lag = 1; lag <= lags; ++lag) {
      std::size_t hits = 0;
      for (std::size_t i = 0; i + lag < bits.size(); ++i) hits += bits[i] & bits[i + lag];
      num[g * lags + lag - 1] += static_cast<double>(hits);
      den[g * lags + lag - 1] += static_cast<double>(bits.size() - lag);
    }
  }
  std::vector<double> tot_num(lags, 0.0), tot_den(lags, 0.0);
  for (std::size_t g = 0; g < groups; ++g)
    for (std::size_t l = 0; l < lags; ++l) {
      tot_num[l] += num[g * lags + l];
      tot_den[l] += den[g * lags + l];
    }
  McEstimate out;
  for (std::size_t l = 0; l < lags; ++l) out.value += tot_num[l] / tot_den[l];
  if (groups >= 2) {
    std::vector<double> leave_out(groups, 0.0);
    for (std::size_t g = 0; g < groups; ++g)
      for (std::size_t l = 0; l < lags; ++l)
        leave_out[g] += (tot_num[l] - num[g * lags + l]) / (tot_den[l] - den[g * lags + l]);
    out.std_error = jackknife_se(leave_out);
  } else {
    out.std_error = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

McEstimate estimate_r1_mc(std::span<const HitSeries> series, const BoundInputs& in, const R1Grid& grid) {
  in.validate();
  if (series.empty()) throw std::invalid_argument("estimate_r1_mc: no series");
  if (grid.points.empty()) throw std::invalid_argument("estimate_r1_mc: empty grid");
  const std::size_t N = in.N, p = in.p;

  // Distinct j values, each with a q -> grid index lookup.
  std::vector<std::size_t> js;
  std::vector<std::vector<int>> index_by_q;
  for (std::size_t k = 0; k < grid.points.size(); ++k) {
    const auto [j, q] = grid.points[k];
    if (j > N - p || q > N - j - p)
      throw std::invalid_argument("estimate_r1_mc: grid point (" + std::to_string(j) + ", " + std::to_string(q) +
                                  ") out of range");
    auto it = std::find(js.begin(), js.end(), j);
    std::size_t slot = static_cast<std::size_t>(it - js.begin());
    if (it == js.end()) {
      js.push_back(j);
      index_by_q.emplace_back(N + 1, -1);
    }
    index_by_q[slot][q] = static_cast<int>(k);
  }

  const std::size_t groups = group_count(series.size());
  const std::size_t K = grid.points.size();
  std::vector<double> windows(groups, 0.0), first_hits(groups, 0.0);
  std::vector<double> in_state(groups * K, 0.0), joint(groups * K, 0.0);
  std::vector<std::uint32_t> prefix;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& bits = series[s].bits;
    if (bits.size() < N) throw std::invalid_argument("estimate_r1_mc: series shorter than N");
    const std::size_t g = group_of(s, series.size(), groups);
    prefix.assign(bits.size() + 1, 0);
    for (std::size_t i = 0; i < bits.size(); ++i) prefix[i + 1] = prefix[i] + bits[i];
    for (std::size_t o = 0; o + N <= bits.size(); ++o) {
      windows[g] += 1.0;
      const bool x1 = bits[o] != 0;
      first_hits[g] += x1;
      for (std::size_t a = 0; a < js.size(); ++a) {
        const std::size_t sum = prefix[o + N - js[a]] - prefix[o + p];
        const int k = index_by_q[a][sum];
        if (k < 0) continue;
        in_state[g * K + static_cast<std::size_t>(k)] += 1.0;
        if (x1) joint[g * K + static_cast<std::size_t>(k)] += 1.0;
      }
    }
  }

  double n_tot = 0.0, x_tot = 0.0;
  std::vector<double> s_tot(K, 0.0), j_tot(K, 0.0);
  for (std::size_t g = 0; g < groups; ++g) {
    n_tot += windows[g];
    x_tot += first_hits[g];
    for (std::size_t k = 0; k < K; ++k) {
      s_tot[k] += in_state[g * K + k];
      j_tot[k] += joint[g * K + k];
    }
  }
  auto discrepancy = [](double n, double x, double s, double j) {
    return std::abs(j / n - (x / n) * (s / n));
  };

  McEstimate out;
  out.lower_bound = true;
  std::size_t best = 0;
  for (std::size_t k = 0; k < K; ++k) {
    const double d = discrepancy(n_tot, x_tot, s_tot[k], j_tot[k]);
    if (d > out.value) {
      out.value = d;
      best = k;
    }
  }
  if (groups >= 2) {
    std::vector<double> leave_out(groups);
    for (std::size_t g = 0; g < groups; ++g)
      leave_out[g] = discrepancy(n_tot - windows[g], x_tot - first_hits[g], s_tot[best] - in_state[g * K + best],
                                 j_tot[best] - joint[g * K + best]);
    out.std_error = jackknife_se(leave_out);
  } else {
    out.std_error = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace pvisit
