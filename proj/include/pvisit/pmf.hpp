#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>

#include <Eigen/Core>

namespace pvisit {

/// Default truncation threshold for Poisson tails.
inline constexpr double kDefaultTailTolerance = 1e-15;

/// Finite probability mass function on {offset, offset + 1, ...}.
///
/// `mass_declared` is one minus the truncated tail; distributions with
/// unbounded support (Poisson) are stored truncated and carry the residual
/// mass explicitly so total variation stays a metric on the stored values.
/// Instances are immutable once constructed.
class Pmf {
 public:
  /// Validates: entries finite and >= 0, |sum - mass_declared| <= 1e-9,
  /// mass_declared in (1 - 1e-12 - tail_tolerance, 1]. Throws
  /// std::invalid_argument otherwise.
  Pmf(std::size_t offset, Eigen::VectorXd probs, double mass_declared = 1.0,
      double tail_tolerance = 0.0);

  static Pmf delta(std::size_t k);

  std::size_t offset() const { return offset_; }
  const Eigen::VectorXd& probs() const { return probs_; }
  double mass_declared() const { return mass_declared_; }
  double tail() const { return 1.0 - mass_declared_; }
  /// One past the largest stored support point.
  std::size_t end() const { return offset_ + static_cast<std::size_t>(probs_.size()); }
  /// P(k); zero outside the stored support.
  double at(std::size_t k) const;
  double mean() const;

 private:
  std::size_t offset_;
  Eigen::VectorXd probs_;
  double mass_declared_;
};

/// Poisson(lambda) truncated at the smallest K whose remaining tail is below
/// `tail_tolerance`. Terms come from P(k+1) = P(k) lambda / (k+1).
Pmf poisson_pmf(double lambda, double tail_tolerance = kDefaultTailTolerance);

/// Exact Binomial(n, eps) on {0, ..., n}.
Pmf binomial_pmf(std::size_t n, double eps);

/// Half the l1 distance, with truncated tails treated as mass at a common
/// virtual point beyond both supports.
double tv_distance(const Pmf& a, const Pmf& b);

/// Le Cam: TV(Binomial(n, lambda/n), Poisson(lambda)) <= 2 lambda^2 / n.
double lecam_bound(std::size_t n, double lambda);

/// Law of the sum of two independent variables.
Pmf convolve(const Pmf& a, const Pmf& b);

/// Normalised histogram of nonnegative integer counts.
template <typename Range>
Pmf empirical_pmf(const Range& counts) {
  std::size_t hi = 0, n = 0;
  for (auto c : counts) {
    hi = std::max<std::size_t>(hi, static_cast<std::size_t>(c));
    ++n;
  }
  if (n == 0) throw std::invalid_argument("empirical_pmf: no samples");
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(hi + 1));
  for (auto c : counts) probs(static_cast<Eigen::Index>(c)) += 1.0;
  probs /= static_cast<double>(n);
  return Pmf(0, std::move(probs));
}

}  // namespace pvisit
