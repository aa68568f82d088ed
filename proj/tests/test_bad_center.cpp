#include <doctest.h>

#include <cmath>

#include "pvisit/bad_center.hpp"
#include "pvisit/numeric.hpp"
#include "pvisit/system.hpp"

using namespace pvisit;

namespace {

Point pt(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

}  // namespace

TEST_CASE("horizon") {
  const double A = cat_map().spec().A;
  CHECK(bad_center_horizon(A, 1e-2) == 0);
  CHECK(bad_center_horizon(A, 1e-5) == 1);
  CHECK(std::log(1e2) / (6 * std::log(A)) == doctest::Approx(0.4636).epsilon(1e-3));
  CHECK(bad_center_horizon(A, 1e-12) == 2);
}

TEST_CASE("cat map examples") {
  const System cat = cat_map();
  const BadCenterReport fixed = detect_bad_center(cat, {pt(0, 0), 1e-5});
  CHECK(fixed.flagged);
  CHECK(fixed.first_bad_k == 1);
  CHECK(fixed.margin < 0.0);

  const BadCenterReport empty = detect_bad_center(cat, {pt(0, 0), 1e-2});
  CHECK_FALSE(empty.flagged);
  CHECK(empty.horizon == 0);
  CHECK(std::isnan(empty.margin));
  CHECK_FALSE(empty.note.empty());

  const BadCenterReport good = detect_bad_center(cat, {pt(0.37, 0.52), 1e-5});
  CHECK_FALSE(good.flagged);
  CHECK(good.horizon == 1);
  const double d = cat.distance(pt(0.37, 0.52), cat.map(pt(0.37, 0.52)));
  CHECK(good.margin == doctest::Approx(d - (cat.spec().A + 1) * 1e-5).epsilon(1e-12));
}

TEST_CASE("period-two point is flagged at k = 2") {
  const System cat = cat_map();
  // (0.2, 0.4) -> (0.8, 0.6) -> (0.2, 0.4)
  const BadCenterReport r = detect_bad_center(cat, {pt(0.2, 0.4), 1e-12});
  CHECK(r.horizon == 2);
  CHECK(r.flagged);
  CHECK(r.first_bad_k == 2);
  const BadCenterReport wide = detect_bad_center(cat, {pt(0.2, 0.4), 1e-5});
  CHECK(wide.horizon == 1);
  CHECK_FALSE(wide.flagged);
}

TEST_CASE("flagging is monotone in r for a fixed k-range") {
  const System cat = cat_map();
  Rng rng(17);
  const double A = cat.spec().A;
  for (int i = 0; i < 300; ++i) {
    const Point x = pt(rng.uniform(), rng.uniform());
    bool was_flagged = false;
    for (double r = 1e-8; r < 5e-5; r *= 1.3) {
      if (bad_center_horizon(A, r) != bad_center_horizon(A, 1e-8)) break;
      const bool f = detect_bad_center(cat, {x, r}).flagged;
      if (was_flagged) CHECK(f);
      was_flagged = was_flagged || f;
    }
  }
}

TEST_CASE("adapters have no phase space") {
  const BadCenterReport r = detect_bad_center(make_system("iid:0.1"), {Point(0), 0.1});
  CHECK_FALSE(r.flagged);
  CHECK_FALSE(r.note.empty());
}
