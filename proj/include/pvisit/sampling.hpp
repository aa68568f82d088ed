#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pvisit/hit_series.hpp"
#include "pvisit/pmf.hpp"
#include "pvisit/system.hpp"

namespace pvisit {

/// Birkhoff average with a batch-means standard error.
struct MeasureEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t iterations = 0;  ///< orbit points actually used
  std::uint64_t escapes = 0;
};

/// Number of batches behind every Birkhoff estimate.
inline constexpr std::size_t kMeasureBatches = 64;
/// Samples per independently seeded block in visit-count sampling.
inline constexpr std::size_t kSamplesPerBlock = 1024;

/// Fraction of orbit points in B_r(x) after burn-in. The cat map uses one
/// long orbit cut into contiguous batches (reached by exact lattice jumps);
/// the other systems run one seeded orbit per batch. Requires iterations >=
/// 1e4; throws EmptyBallError when no point lands in the ball.
MeasureEstimate estimate_measure(const System& system, const BallTarget& target, std::uint64_t iterations,
                                 std::uint64_t seed, unsigned workers = 1);

/// Birkhoff estimate of mu{y : r_lo < d(x, y) <= r_hi} on the same orbit
/// sample estimate_measure would use for that seed.
MeasureEstimate annulus_measure(const System& system, const Point& x, double r_lo, double r_hi,
                                std::uint64_t iterations, std::uint64_t seed, unsigned workers = 1);

/// Corona B_r \ B_{r - r^delta} as (r_lo, r_hi).
std::pair<double, double> corona_radii(double r, double delta);
/// Corona B_{r + alpha^p} \ B_{r - alpha^p} as (r_lo, r_hi), r_lo clamped at 0.
std::pair<double, double> alpha_corona_radii(double r, double alpha, std::size_t p);

/// bits[j] = 1 iff T^j(y0) lies in the target ball, j = 0..N-1. `seed`
/// drives the stochastic adapters and the doubling map's low digits.
HitSeries orbit_hits(const System& system, const BallTarget& target, const Point& y0, std::size_t N,
                     std::uint64_t seed);

struct VisitSamplingOptions {
  /// Birkhoff iterations for the measure estimate when `eps_hat` is unset.
  std::uint64_t measure_iterations = 10'000'000;
  /// Reuse a measure estimate instead of recomputing it.
  std::optional<MeasureEstimate> eps_hat;
  /// Keep the hit bits of the first `keep_series` windows.
  std::size_t keep_series = 0;
  unsigned workers = 1;
};

struct VisitSample {
  Pmf empirical = Pmf::delta(0);
  std::vector<std::uint32_t> counts;
  std::size_t N_used = 0;
  std::size_t n_samples = 0;
  MeasureEstimate eps_hat;
  /// Fewer than 100 samples.
  bool low_sample_warning = false;
  std::uint64_t escapes = 0;
  std::vector<HitSeries> series;
};

/// Samples of Z = sum_{j=0}^{N_used} 1_B(T^j y) with N_used = floor(t / eps_hat).
/// Windows are consecutive stretches of one orbit separated by `gap`
/// iterations; blocks of kSamplesPerBlock windows are independent orbits
/// (cat map: disjoint stretches of a single orbit), so the output does not
/// depend on `workers`. A window whose orbit escapes is discarded and redrawn
/// from a fresh basin point.
VisitSample sample_visit_counts(const System& system, const BallTarget& target, double t, std::size_t n_samples,
                                std::uint64_t gap, std::uint64_t seed, const VisitSamplingOptions& options = {});

/// Points drawn along a long orbit after burn-in, spaced `spacing` steps apart.
std::vector<Point> sample_orbit_points(const System& system, std::size_t count, std::uint64_t spacing,
                                       std::uint64_t seed);

}  // namespace pvisit
