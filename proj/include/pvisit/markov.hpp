#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "pvisit/bound.hpp"
#include "pvisit/pmf.hpp"

namespace pvisit {

/// Stationary finite-state Markov chain observed through a hit set:
/// X_n = 1 iff the state at time n belongs to `hit`.
class MarkovBinaryModel {
 public:
  /// Rows of `transition` must sum to 1 within 1e-12. When `stationary` is
  /// absent it is found by power iteration on the lazy chain (P + I) / 2 to
  /// 1e-13; either way pi P = pi must hold within 1e-10.
  MarkovBinaryModel(Eigen::MatrixXd transition, std::vector<std::size_t> hit,
                    std::optional<Eigen::RowVectorXd> stationary = std::nullopt);

  /// All rows equal to `row`: an i.i.d. process embedded as a chain.
  static MarkovBinaryModel iid(const Eigen::RowVectorXd& row, std::vector<std::size_t> hit);

  std::size_t states() const { return static_cast<std::size_t>(transition_.rows()); }
  const Eigen::MatrixXd& transition() const { return transition_; }
  const Eigen::RowVectorXd& stationary() const { return stationary_; }
  const std::vector<std::size_t>& hit() const { return hit_; }
  /// 1.0 on hit states, 0.0 elsewhere.
  const Eigen::VectorXd& hit_indicator() const { return indicator_; }
  bool is_hit(std::size_t s) const { return indicator_(static_cast<Eigen::Index>(s)) != 0.0; }
  double eps() const;

 private:
  Eigen::MatrixXd transition_;
  Eigen::RowVectorXd stationary_;
  std::vector<std::size_t> hit_;
  Eigen::VectorXd indicator_;
};

inline constexpr std::size_t kMaxDpLength = 4096;
inline constexpr std::size_t kMaxEnumerationLength = 20;
inline constexpr double kMaxEnumeratedPaths = 1e8;

/// Law of S_1^N from the stationary start, by dynamic programming over
/// (state, count). Throws ResourceLimitError for N > 4096.
Pmf exact_count_distribution(const MarkovBinaryModel& model, std::size_t N);

/// Same law by summing the probability of every one of the K^N paths.
/// Throws ResourceLimitError when N > 20 or K^N > 1e8.
Pmf enumerate_count_distribution(const MarkovBinaryModel& model, std::size_t N);

/// Exact r1 (supremum over every admissible (j, q)) and r2 for the chain.
/// Requires 2 <= p < N <= 2048.
CorrelationTerms exact_correlation_terms(const MarkovBinaryModel& model, std::size_t N, std::size_t p);

/// Split point j of the hybrid sum S~_1^j + S_{j+1}^N: the first j
/// coordinates are replaced by independent Bernoulli(eps) variables.
struct HybridSpec {
  std::size_t j = 0;
  std::size_t N = 0;
  double eps = 0.0;
};

/// Binomial(j, eps) convolved with the law of S_1^{N-j}. Only the law is
/// computed; no coupling with the chain is constructed.
Pmf hybrid_distribution(const MarkovBinaryModel& model, const HybridSpec& spec);

/// |[P(S_1^N = k) - P(S~_1^N = k)] - sum_{j<N} (hybrid(j)_k - hybrid(j+1)_k)|.
/// Requires 0 <= k <= N <= 512.
double telescoping_residual(const MarkovBinaryModel& model, std::size_t N, std::size_t k);

/// telescoping_residual for every k in [0, N], sharing the hybrid laws.
std::vector<double> telescoping_residuals(const MarkovBinaryModel& model, std::size_t N);

/// Unnormalised laws of the hit count over windows of length 0..max_len for a
/// chain whose first counted state has distribution `start` (any nonnegative
/// row vector). Entry L has L + 1 components summing to start.sum().
std::vector<Eigen::VectorXd> count_laws_by_length(const MarkovBinaryModel& model,
                                                  const Eigen::RowVectorXd& start, std::size_t max_len);

}  // namespace pvisit
