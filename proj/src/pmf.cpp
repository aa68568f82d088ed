#include "pvisit/pmf.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "pvisit/numeric.hpp"

namespace pvisit {

Pmf::Pmf(std::size_t offset, Eigen::VectorXd probs, double mass_declared, double tail_tolerance)
    : offset_(offset), probs_(std::move(probs)), mass_declared_(mass_declared) {
  if (probs_.size() == 0) throw std::invalid_argument("Pmf: empty probability vector");
  if (!(mass_declared_ <= 1.0) || !(mass_declared_ > 1.0 - 1e-12 - tail_tolerance))
    throw std::invalid_argument("Pmf: declared mass " + format_double(mass_declared_) +
                                " outside (1 - 1e-12 - tail_tolerance, 1]");
  CompensatedSum<double> total;
  for (Eigen::Index i = 0; i < probs_.size(); ++i) {
    const double v = probs_(i);
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument("Pmf: entry " + std::to_string(i) + " is negative or not finite");
    total.add(v);
  }
  if (std::abs(total.value() - mass_declared_) > 1e-9)
    throw std::invalid_argument("Pmf: entries sum to " + format_double(total.value()) +
                                ", declared mass " + format_double(mass_declared_));
}

Pmf Pmf::delta(std::size_t k) { return Pmf(k, Eigen::VectorXd::Ones(1)); }

double Pmf::at(std::size_t k) const {
  if (k < offset_ || k >= end()) return 0.0;
  return probs_(static_cast<Eigen::Index>(k - offset_));
}

double Pmf::mean() const {
  CompensatedSum<double> acc;
  for (Eigen::Index i = 0; i < probs_.size(); ++i)
    acc.add(static_cast<double>(offset_ + static_cast<std::size_t>(i)) * probs_(i));
  return acc.value();
}

namespace {

// Poisson terms from k = 0 up to the first term past the mean that drops below
// `stop_below`.
std::vector<double> poisson_terms(double lambda, double stop_below) {
  std::vector<double> terms;
  if (lambda < 700.0) {
    double p = std::exp(-lambda);
    std::size_t k = 0;
    terms.push_back(p);
    while (!(static_cast<double>(k) > lambda && p < stop_below)) {
      p *= lambda / static_cast<double>(k + 1);
      ++k;
      terms.push_back(p);
    }
    return terms;
  }
  // exp(-lambda) underflows: start at the mode in log space.
  const auto mode = static_cast<std::size_t>(std::floor(lambda));
  const double log_pm =
      -lambda + static_cast<double>(mode) * std::log(lambda) - std::lgamma(static_cast<double>(mode) + 1.0);
  std::vector<double> below(mode + 1, 0.0);
  below[mode] = std::exp(log_pm);
  for (std::size_t k = mode; k > 0; --k) below[k - 1] = below[k] * static_cast<double>(k) / lambda;
  terms = std::move(below);
  double p = terms.back();
  std::size_t k = mode;
  while (!(static_cast<double>(k) > lambda && p < stop_below)) {
    p *= lambda / static_cast<double>(k + 1);
    ++k;
    terms.push_back(p);
  }
  // lgamma carries a relative error that scales with log(mode); the terms
  // cover all but ~stop_below of the mass, so normalising removes it.
  const double total = compensated_total(terms);
  for (double& t : terms) t /= total;
  return terms;
}

}  // namespace

Pmf poisson_pmf(double lambda, double tail_tolerance) {
  if (!std::isfinite(lambda) || lambda < 0.0)
    throw std::invalid_argument("poisson_pmf: lambda must be finite and >= 0");
  if (!(tail_tolerance > 0.0 && tail_tolerance <= 1e-6))
    throw std::invalid_argument("poisson_pmf: tail_tolerance must lie in (0, 1e-6]");
  if (lambda == 0.0) return Pmf::delta(0);

  // Generate well past the cut so the suffix sums below are the actual tails.
  const std::vector<double> terms = poisson_terms(lambda, tail_tolerance * 1e-6);
  std::vector<double> suffix(terms.size() + 1, 0.0);
  for (std::size_t k = terms.size(); k > 0; --k) suffix[k - 1] = suffix[k] + terms[k - 1];

  std::size_t keep = 1;
  while (keep < terms.size() && !(suffix[keep] < tail_tolerance)) ++keep;
  Eigen::VectorXd probs(static_cast<Eigen::Index>(keep));
  for (std::size_t k = 0; k < keep; ++k) probs(static_cast<Eigen::Index>(k)) = terms[k];
  return Pmf(0, std::move(probs), 1.0 - suffix[keep], tail_tolerance);
}

Pmf binomial_pmf(std::size_t n, double eps) {
  if (n < 1) throw std::invalid_argument("binomial_pmf: n must be >= 1");
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("binomial_pmf: eps outside [0, 1]");
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n + 1));
  if (eps == 0.0) {
    probs(0) = 1.0;
    return Pmf(0, std::move(probs));
  }
  if (eps == 1.0) {
    probs(static_cast<Eigen::Index>(n)) = 1.0;
    return Pmf(0, std::move(probs));
  }
  const double dn = static_cast<double>(n);
  const double log_q = std::log1p(-eps);
  const double odds = eps / (1.0 - eps);
  if (-dn * log_q < 700.0) {
    double p = std::exp(dn * log_q);
    probs(0) = p;
    for (std::size_t k = 0; k < n; ++k) {
      p *= static_cast<double>(n - k) / static_cast<double>(k + 1) * odds;
      probs(static_cast<Eigen::Index>(k + 1)) = p;
    }
  } else {
    const auto mode = std::min<std::size_t>(n, static_cast<std::size_t>(std::floor((dn + 1.0) * eps)));
    const double dm = static_cast<double>(mode);
    const double log_pm = std::lgamma(dn + 1.0) - std::lgamma(dm + 1.0) - std::lgamma(dn - dm + 1.0) +
                          dm * std::log(eps) + (dn - dm) * log_q;
    probs(static_cast<Eigen::Index>(mode)) = std::exp(log_pm);
    for (std::size_t k = mode; k > 0; --k)
      probs(static_cast<Eigen::Index>(k - 1)) = probs(static_cast<Eigen::Index>(k)) *
                                                static_cast<double>(k) / (static_cast<double>(n - k + 1) * odds);
    for (std::size_t k = mode; k < n; ++k)
      probs(static_cast<Eigen::Index>(k + 1)) = probs(static_cast<Eigen::Index>(k)) *
                                                static_cast<double>(n - k) / static_cast<double>(k + 1) * odds;
    // same lgamma drift as in the Poisson case
    probs /= compensated_total(probs);
  }
  return Pmf(0, std::move(probs));
}

double tv_distance(const Pmf& a, const Pmf& b) {
  const std::size_t lo = std::min(a.offset(), b.offset());
  const std::size_t hi = std::max(a.end(), b.end());
  CompensatedSum<double> acc;
  for (std::size_t k = lo; k < hi; ++k) acc.add(std::abs(a.at(k) - b.at(k)));
  acc.add(std::abs(a.tail() - b.tail()));
  return std::clamp(0.5 * acc.value(), 0.0, 1.0);
}

double lecam_bound(std::size_t n, double lambda) {
  if (n < 1) throw std::invalid_argument("lecam_bound: n must be >= 1");
  return 2.0 * lambda * lambda / static_cast<double>(n);
}

Pmf convolve(const Pmf& a, const Pmf& b) {
  const Eigen::Index na = a.probs().size(), nb = b.probs().size();
  std::vector<CompensatedSum<double>> acc(static_cast<std::size_t>(na + nb - 1));
  for (Eigen::Index i = 0; i < na; ++i)
    for (Eigen::Index j = 0; j < nb; ++j) acc[static_cast<std::size_t>(i + j)].add(a.probs()(i) * b.probs()(j));
  Eigen::VectorXd probs(na + nb - 1);
  for (Eigen::Index i = 0; i < probs.size(); ++i) probs(i) = acc[static_cast<std::size_t>(i)].value();
  const double mass = a.mass_declared() * b.mass_declared();
  return Pmf(a.offset() + b.offset(), std::move(probs), mass, 1.0 - mass);
}

}  // namespace pvisit
