#include "pvisit/omega.hpp"

#include <cmath>
#include <stdexcept>

#include "pvisit/numeric.hpp"

namespace pvisit {

ReturnTimeTail ReturnTimeTail::geometric(double theta) {
  if (!(theta >= 0.0 && theta < 1.0)) throw std::invalid_argument("geometric tail: theta must lie in [0, 1)");
  ReturnTimeTail t;
  t.kind_ = Kind::geometric;
  t.theta_ = theta;
  return t;
}

ReturnTimeTail ReturnTimeTail::table(std::map<std::size_t, double> masses) {
  CompensatedSum<double> total, first_moment;
  for (const auto& [k, m] : masses) {
    if (!(m >= 0.0)) throw std::invalid_argument("return-time table: masses must be >= 0");
    if (!std::isfinite(m)) throw std::invalid_argument("return-time table: infinite mean");
    total.add(m);
    first_moment.add(static_cast<double>(k) * m);
  }
  if (total.value() > 1.0 + 1e-12) throw std::invalid_argument("return-time table: masses sum above 1");
  if (!std::isfinite(first_moment.value())) throw std::invalid_argument("return-time table: infinite mean");
  ReturnTimeTail t;
  t.kind_ = Kind::table;
  t.masses_ = std::move(masses);
  return t;
}

std::size_t ReturnTimeTail::support_bound() const {
  if (kind_ == Kind::geometric || masses_.empty()) return 0;
  return masses_.rbegin()->first;
}

double ReturnTimeTail::mean() const {
  if (kind_ == Kind::geometric) return 1.0 / (1.0 - theta_);
  CompensatedSum<double> acc;
  for (const auto& [k, m] : masses_) acc.add(static_cast<double>(k) * m);
  return acc.value();
}

double omega(const ReturnTimeTail& tail, double s) {
  if (!(s >= 0.0) || !std::isfinite(s)) throw std::invalid_argument("omega: s must be finite and >= 0");
  const auto first = static_cast<std::size_t>(std::max(1.0, std::ceil(s)));
  CompensatedSum<double> acc;
  if (tail.kind() == ReturnTimeTail::Kind::table) {
    for (auto it = tail.masses().lower_bound(first); it != tail.masses().end(); ++it)
      acc.add(static_cast<double>(it->first) * it->second);
    return std::sqrt(acc.value());
  }
  const double theta = tail.theta();
  if (theta == 0.0) return first == 1 ? 1.0 : 0.0;
  // term(k) = k (1 - theta) theta^(k-1); after term k the rest sums to
  // theta^k (k + 1 - k theta) / (1 - theta).
  double power = std::pow(theta, static_cast<double>(first - 1));
  for (std::size_t k = first;; ++k) {
    const double dk = static_cast<double>(k);
    acc.add(dk * (1.0 - theta) * power);
    power *= theta;
    const double remainder = power * (dk + 1.0 - dk * theta) / (1.0 - theta);
    if (remainder < 1e-14) break;
  }
  return std::sqrt(acc.value());
}

}  // namespace pvisit
