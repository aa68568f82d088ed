#include "pvisit/bad_center.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pvisit {

std::size_t bad_center_horizon(double A, double r) {
  if (!(A >= 2.0)) throw std::invalid_argument("bad_center_horizon: A must be >= 2");
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("bad_center_horizon: r must lie in (0, 1)");
  return static_cast<std::size_t>(std::floor(std::log(1.0 / r) / (6.0 * std::log(A))));
}

BadCenterReport detect_bad_center(const System& system, const BallTarget& target) {
  BadCenterReport out;
  out.horizon = bad_center_horizon(system.spec().A, target.radius);
  out.margin = std::numeric_limits<double>::quiet_NaN();
  if (!system.has_geometry()) {
    out.note = "no phase space";
    return out;
  }
  if (target.center.size() != system.spec().dimension)
    throw std::invalid_argument("detect_bad_center: center has the wrong dimension");
  if (out.horizon == 0) {
    out.note = "empty k-range";
    return out;
  }
  const Point x = system.canonical(target.center);
  Point image = x;
  double expansion = 1.0;
  for (std::size_t k = 1; k <= out.horizon; ++k) {
    image = system.map(image);
    expansion *= system.spec().A;
    const double slack = system.distance(x, image) - (expansion + 1.0) * target.radius;
    if (k == 1 || slack < out.margin) out.margin = slack;
    if (slack <= 0.0 && !out.flagged) {
      out.flagged = true;
      out.first_bad_k = k;
    }
  }
  return out;
}

}  // namespace pvisit
