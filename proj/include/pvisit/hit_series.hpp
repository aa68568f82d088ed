#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace pvisit {

using Point = Eigen::VectorXd;

/// Closed ball B_r(x) under the owning system's metric.
struct BallTarget {
  Point center;
  double radius = 0.0;
};

/// Binary visit indicators X_j = 1{T^j y in B_r(x)} along one orbit stretch.
struct HitSeries {
  std::vector<std::uint8_t> bits;
  std::uint64_t origin = 0;  ///< orbit offset of bits[0]
  BallTarget target;
  std::string seed_path;  ///< master seed and derivation steps, "/"-separated

  std::size_t size() const { return bits.size(); }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto b : bits) c += b;
    return c;
  }
};

}  // namespace pvisit
