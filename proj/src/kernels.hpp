// Hot-loop orbit kernels. Each kernel exposes
//   State start(Rng&)                 a draw from the reference measure or basin
//   State from_point(const Point&)    the state of a given phase point
//   bool step(State&, Rng&)           one map application; false on escape
//   bool hit(const State&)            membership in the configured band
// and, when `kJumpable`, jump(State&, k) == k calls of step.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "pvisit/numeric.hpp"
#include "pvisit/system.hpp"

namespace pvisit::detail {

/// Distance band {lo < d <= hi} stored as squared radii; lo2 < 0 admits d = 0.
struct Band {
  double lo2 = -1.0;
  double hi2 = 0.0;
  double hi = 0.0;

  static Band ball(double r) { return {-1.0, r * r, r}; }
  static Band annulus(double r_lo, double r_hi) { return {r_lo * r_lo, r_hi * r_hi, r_hi}; }
  bool contains(double d2) const { return d2 > lo2 && d2 <= hi2; }
};

inline double signed_torus_delta(std::uint64_t a, std::uint64_t b) {
  return static_cast<double>(static_cast<std::int64_t>(a - b)) * 0x1.0p-64;
}

// Cheap rejection: |a - b| on the circle exceeds `box` lattice units.
inline bool outside_box(std::uint64_t a, std::uint64_t b, std::uint64_t box) {
  return (a - b) + box > 2 * box;
}

inline std::uint64_t box_for(double r) {
  if (r >= 0.25) return 0;  // no rejection
  return static_cast<std::uint64_t>(std::ceil(std::ldexp(r, 64))) + 1;
}

/// 2x2 integer matrix acting on Z^2 / 2^64 Z^2.
struct LatticeMatrix {
  std::uint64_t a, b, c, d;
  LatticeMatrix operator*(const LatticeMatrix& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  static LatticeMatrix power(LatticeMatrix m, std::uint64_t k) {
    LatticeMatrix out{1, 0, 0, 1};
    while (k) {
      if (k & 1) out = out * m;
      m = m * m;
      k >>= 1;
    }
    return out;
  }
};

class CatKernel {
 public:
  static constexpr bool kJumpable = true;
  static constexpr LatticeMatrix kMatrix{2, 1, 1, 1};
  struct State {
    std::uint64_t x, y;
  };

  CatKernel(const Point& center, Band band)
      : cx_(to_lattice(center(0))), cy_(to_lattice(center(1))), band_(band), box_(box_for(band.hi)) {}

  State start(Rng& rng) const {
    const std::uint64_t x = rng.bits();
    return {x, rng.bits()};
  }
  static State from_point(const Point& p) { return {to_lattice(p(0)), to_lattice(p(1))}; }
  static Point to_point(const State& s) { return Eigen::Vector2d(from_lattice(s.x), from_lattice(s.y)); }

  static bool step(State& s, Rng&) {
    const std::uint64_t nx = 2 * s.x + s.y;
    s.y = s.x + s.y;
    s.x = nx;
    return true;
  }
  static void apply(State& s, const LatticeMatrix& m) {
    const std::uint64_t nx = m.a * s.x + m.b * s.y;
    s.y = m.c * s.x + m.d * s.y;
    s.x = nx;
  }
  static void jump(State& s, std::uint64_t k) { apply(s, LatticeMatrix::power(kMatrix, k)); }

  bool hit(const State& s) const {
    if (box_ && (outside_box(s.x, cx_, box_) || outside_box(s.y, cy_, box_))) return false;
    const double dx = signed_torus_delta(s.x, cx_), dy = signed_torus_delta(s.y, cy_);
    return band_.contains(dx * dx + dy * dy);
  }

 private:
  std::uint64_t cx_, cy_;
  Band band_;
  std::uint64_t box_;
};

/// x -> 2x mod 1 as a left shift of a 64-bit binary expansion. Digits past
/// the 64th are not carried by a double, so they are drawn from the stream.
class DoublingKernel {
 public:
  static constexpr bool kJumpable = false;
  struct State {
    std::uint64_t x;
    std::uint64_t digits = 0;
    int available = 0;
  };

  DoublingKernel(const Point& center, Band band)
      : cx_(to_lattice(center(0))), band_(band), box_(box_for(band.hi)) {}

  State start(Rng& rng) const { return {rng.bits()}; }
  static State from_point(const Point& p) { return {to_lattice(p(0))}; }
  static Point to_point(const State& s) { return Eigen::VectorXd::Constant(1, from_lattice(s.x)); }

  static bool step(State& s, Rng& rng) {
    if (s.available == 0) {
      s.digits = rng.bits();
      s.available = 64;
    }
    s.x = (s.x << 1) | (s.digits >> 63);
    s.digits <<= 1;
    --s.available;
    return true;
  }
  bool hit(const State& s) const {
    if (box_ && outside_box(s.x, cx_, box_)) return false;
    const double dx = signed_torus_delta(s.x, cx_);
    return band_.contains(dx * dx);
  }

 private:
  std::uint64_t cx_;
  Band band_;
  std::uint64_t box_;
};

/// Hénon (x, y) -> (1 - a x^2 + y, b x) or Lozi (x, y) -> (1 - a |x| + y, b x).
template <bool kLozi>
class PlanarKernel {
 public:
  static constexpr bool kJumpable = false;
  struct State {
    double x, y;
  };

  PlanarKernel(const System& system, const Point& center, Band band)
      : a_(system.param("a")),
        b_(system.param("b")),
        escape_(system.spec().escape_radius),
        sx_(system.spec().start(0)),
        sy_(system.spec().start(1)),
        cx_(center(0)),
        cy_(center(1)),
        band_(band) {}

  // Basin start point jittered so distinct seeds give distinct orbits.
  State start(Rng& rng) const { return {sx_ + 1e-4 * (rng.uniform() - 0.5), sy_ + 1e-4 * (rng.uniform() - 0.5)}; }
  static State from_point(const Point& p) { return {p(0), p(1)}; }
  static Point to_point(const State& s) { return Eigen::Vector2d(s.x, s.y); }

  bool step(State& s, Rng&) const {
    const double fx = kLozi ? std::abs(s.x) : s.x * s.x;
    const double nx = 1.0 - a_ * fx + s.y;
    s.y = b_ * s.x;
    s.x = nx;
    return std::abs(s.x) <= escape_ && std::abs(s.y) <= escape_;
  }
  bool hit(const State& s) const {
    const double dx = s.x - cx_, dy = s.y - cy_;
    if (std::abs(dx) > band_.hi || std::abs(dy) > band_.hi) return false;
    return band_.contains(dx * dx + dy * dy);
  }

 private:
  double a_, b_, escape_, sx_, sy_, cx_, cy_;
  Band band_;
};

using HenonKernel = PlanarKernel<false>;
using LoziKernel = PlanarKernel<true>;

class IidKernel {
 public:
  static constexpr bool kJumpable = false;
  struct State {
    bool hit;
  };
  explicit IidKernel(double eps) : eps_(eps) {}
  State start(Rng& rng) const { return {rng.bernoulli(eps_)}; }
  static State from_point(const Point&) { throw std::invalid_argument("i.i.d. adapter has no phase points"); }
  static Point to_point(const State&) { throw std::invalid_argument("i.i.d. adapter has no phase points"); }
  bool step(State& s, Rng& rng) const {
    s.hit = rng.bernoulli(eps_);
    return true;
  }
  static bool hit(const State& s) { return s.hit; }

 private:
  double eps_;
};

class MarkovKernel {
 public:
  static constexpr bool kJumpable = false;
  struct State {
    Eigen::Index s;
  };
  explicit MarkovKernel(const MarkovBinaryModel& model) : model_(model), cumulative_(model.transition()) {
    for (Eigen::Index i = 0; i < cumulative_.rows(); ++i)
      for (Eigen::Index j = 1; j < cumulative_.cols(); ++j) cumulative_(i, j) += cumulative_(i, j - 1);
    stationary_cdf_ = model.stationary();
    for (Eigen::Index j = 1; j < stationary_cdf_.size(); ++j) stationary_cdf_(j) += stationary_cdf_(j - 1);
  }
  State start(Rng& rng) const { return {draw(stationary_cdf_, rng.uniform())}; }
  State from_point(const Point& p) const {
    const auto s = static_cast<Eigen::Index>(std::llround(p(0)));
    if (s < 0 || s >= cumulative_.rows()) throw std::invalid_argument("Markov adapter: state index out of range");
    return {s};
  }
  static Point to_point(const State& s) { return Eigen::VectorXd::Constant(1, static_cast<double>(s.s)); }
  bool step(State& st, Rng& rng) const {
    st.s = draw(cumulative_.row(st.s), rng.uniform());
    return true;
  }
  bool hit(const State& st) const { return model_.is_hit(static_cast<std::size_t>(st.s)); }

 private:
  template <typename Row>
  static Eigen::Index draw(const Row& cdf, double u) {
    const Eigen::Index n = cdf.size();
    for (Eigen::Index j = 0; j + 1 < n; ++j)
      if (u < cdf(j)) return j;
    return n - 1;
  }
  const MarkovBinaryModel& model_;
  Eigen::MatrixXd cumulative_;
  Eigen::RowVectorXd stationary_cdf_;
};

/// Builds the kernel matching `system` for the band around `center` and
/// passes it to `fn`.
template <typename Fn>
decltype(auto) with_kernel(const System& system, const Point& center, Band band, Fn&& fn) {
  switch (system.kind()) {
    case SystemKind::cat: return fn(CatKernel(center, band));
    case SystemKind::doubling: return fn(DoublingKernel(center, band));
    case SystemKind::henon: return fn(HenonKernel(system, center, band));
    case SystemKind::lozi: return fn(LoziKernel(system, center, band));
    case SystemKind::iid: return fn(IidKernel(system.param("eps")));
    case SystemKind::markov: return fn(MarkovKernel(*system.markov_model()));
  }
  throw std::logic_error("with_kernel: unknown system kind");
}

}  // namespace pvisit::detail
