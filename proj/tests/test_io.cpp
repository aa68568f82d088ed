#include <doctest.h>

#include <cmath>

#include "pvisit/errors.hpp"
#include "pvisit/io.hpp"
#include "pvisit/numeric.hpp"

using namespace pvisit;

TEST_CASE("format_double keeps 17 digits and a decimal marker") {
  CHECK(format_double(0.0) == "0.0");
  CHECK(format_double(3.0) == "3.0");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1e-20) == "9.9999999999999995e-21");
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(rng.uniform(), static_cast<int>(rng.bits() % 200) - 100);
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("pmf json round trip is bit exact") {
  const Pmf p = poisson_pmf(3.7);
  const Pmf q = pmf_from_json(pmf_to_json(p));
  CHECK(q.offset() == p.offset());
  CHECK(q.mass_declared() == p.mass_declared());
  CHECK(q.probs() == p.probs());
  CHECK(pmf_to_json(q) == pmf_to_json(p));
  const Pmf shifted = pmf_from_json(R"({"offset": 3, "probs": [0.25, 0.75]})");
  CHECK(shifted.at(4) == 0.75);
  CHECK(shifted.mass_declared() == 1.0);
}

TEST_CASE("malformed pmf files are validation errors") {
  CHECK_THROWS_AS(pmf_from_json("{"), ValidationError);
  CHECK_THROWS_AS(pmf_from_json(R"({"offset": 0})"), ValidationError);
  CHECK_THROWS_AS(pmf_from_json(R"({"offset": 0, "probs": [0.5, 0.6]})"), ValidationError);
  CHECK_THROWS_AS(pmf_from_json(R"({"offset": -1, "probs": [1.0]})"), ValidationError);
}

TEST_CASE("model json round trip") {
  Eigen::MatrixXd P(3, 3);
  P << 0.8, 0.15, 0.05, 0.2, 0.7, 0.1, 0.6, 0.1, 0.3;
  const MarkovBinaryModel m(P, {2});
  const MarkovBinaryModel r = model_from_json(model_to_json(m));
  CHECK(r.transition() == m.transition());
  CHECK(r.stationary() == m.stationary());
  CHECK(r.hit() == m.hit());
  CHECK(model_to_json(r) == model_to_json(m));
  CHECK_THROWS_AS(model_from_json(R"({"states": 2, "transition": [1, 0, 0], "hit": [1]})"), ValidationError);
  CHECK_THROWS_AS(model_from_json(R"({"states": 2, "transition": [1, 0, 0, 1], "hit": [5]})"), ValidationError);
}

TEST_CASE("hit series round trip") {
  HitSeries s;
  s.bits = {0, 1, 1, 0, 1};
  s.origin = 12345678901234ULL;
  s.target.center = Eigen::Vector2d(0.1, 0.7);
  s.target.radius = 0.05;
  s.seed_path = "42/7/3";
  const HitSeries r = hit_series_from_json(hit_series_to_json(s));
  CHECK(r.bits == s.bits);
  CHECK(r.origin == s.origin);
  CHECK(r.target.center == s.target.center);
  CHECK(r.target.radius == s.target.radius);
  CHECK(r.seed_path == s.seed_path);
  CHECK_THROWS_AS(hit_series_from_json(R"({"bits": "0120"})"), ValidationError);
}

TEST_CASE("point text") {
  const Point p = point_from_text("0.25,-1e-3");
  CHECK(p.size() == 2);
  CHECK(p(1) == -1e-3);
  CHECK(point_to_text(p) == "0.25,-0.001");
  CHECK(point_from_text(point_to_text(Eigen::Vector2d(0.1, 0.2))) == Eigen::Vector2d(0.1, 0.2));
  CHECK_THROWS_AS(point_from_text("0.1,abc"), ValidationError);
}
