#pragma once

#include <cstddef>
#include <string>

#include "pvisit/hit_series.hpp"
#include "pvisit/system.hpp"

namespace pvisit {

struct BadCenterReport {
  bool flagged = false;
  /// Smallest k with d(x, T^k x) <= (A^k + 1) r; 0 when unflagged.
  std::size_t first_bad_k = 0;
  /// min_k [d(x, T^k x) - (A^k + 1) r]; NaN when the k-range is empty.
  double margin = 0.0;
  /// floor(log(1/r) / (6 log A)).
  std::size_t horizon = 0;
  std::string note;
};

/// Last return time k checked for a ball of radius r: floor(log(1/r) / (6 log A)).
std::size_t bad_center_horizon(double A, double r);

/// Flags centers whose ball can meet one of its own early images: tests
/// d(x, T^k x) <= (A^k + 1) r for k = 1..horizon. That inequality is
/// necessary for B_r(x) and T^k(B_r(x)) to intersect.
BadCenterReport detect_bad_center(const System& system, const BallTarget& target);

}  // namespace pvisit
