#pragma once

#include <cstddef>
#include <map>

namespace pvisit {

/// Law of a return time R >= 1: geometric m{R = k} = (1 - theta) theta^(k-1),
/// or an explicit table {k -> m{R = k}}.
class ReturnTimeTail {
 public:
  enum class Kind { geometric, table };

  static ReturnTimeTail geometric(double theta);
  static ReturnTimeTail table(std::map<std::size_t, double> masses);

  Kind kind() const { return kind_; }
  double theta() const { return theta_; }
  const std::map<std::size_t, double>& masses() const { return masses_; }
  /// Largest k carrying mass; 0 for geometric (unbounded).
  std::size_t support_bound() const;
  double mean() const;

 private:
  Kind kind_ = Kind::geometric;
  double theta_ = 0.0;
  std::map<std::size_t, double> masses_;
};

/// Omega(s) = sqrt(sum_{k >= s} k m{R = k}), summed until the remainder is
/// below 1e-14.
double omega(const ReturnTimeTail& tail, double s);

}  // namespace pvisit
