#include "pvisit/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "kernels.hpp"
#include "pvisit/errors.hpp"
#include "pvisit/numeric.hpp"
#include "pvisit/parallel.hpp"

namespace pvisit {

namespace {

using detail::Band;

// Stream tags for seed derivation.
enum : std::uint64_t { kStreamOrbit = 1, kStreamBatch = 2, kStreamBlock = 3, kStreamPoints = 4 };

constexpr std::uint64_t kMaxRestarts = 1000;

template <typename K>
struct Orbit {
  typename K::State state;
  Rng rng;
  std::uint64_t attempt;
};

// Successive basin starts for one stream; every start runs the burn-in, and
// starts that escape during burn-in are counted and replaced.
template <typename K>
class OrbitSource {
 public:
  OrbitSource(const K& kernel, const System& system, std::uint64_t seed)
      : kernel_(kernel), burn_in_(system.spec().burn_in), seed_(seed) {}

  Orbit<K> fresh() {
    while (attempt_ < kMaxRestarts) {
      const std::uint64_t attempt = attempt_++;
      Rng rng(derive_seed(seed_, attempt));
      auto state = kernel_.start(rng);
      bool alive = true;
      for (std::uint64_t i = 0; i < burn_in_ && alive; ++i) alive = kernel_.step(state, rng);
      if (alive) return {state, rng, attempt};
      ++escapes;
    }
    throw EscapedBasinError("no basin start survived the burn-in", burn_in_);
  }

  std::uint64_t escapes = 0;

 private:
  const K& kernel_;
  std::uint64_t burn_in_;
  std::uint64_t seed_;
  std::uint64_t attempt_ = 0;
};

void check_target(const System& system, const BallTarget& target) {
  if (!(target.radius > 0.0 && target.radius < 1.0)) throw std::invalid_argument("ball radius must lie in (0, 1)");
  if (system.has_geometry()) {
    if (target.center.size() != system.spec().dimension)
      throw std::invalid_argument("ball center has the wrong dimension for " + system.name());
    if (!target.center.allFinite()) throw std::invalid_argument("ball center is not finite");
  }
}

Point kernel_center(const System& system, const Point& center) {
  if (!system.has_geometry()) return Eigen::VectorXd::Zero(1);
  return center;
}

struct BatchResult {
  std::uint64_t hits = 0;
  std::uint64_t escapes = 0;
};

template <typename K>
std::vector<BatchResult> run_batches(const K& kernel, const System& system, std::uint64_t seed,
                                     std::uint64_t batch_len, unsigned workers) {
  std::vector<BatchResult> out(kMeasureBatches);
  if constexpr (K::kJumpable) {
    OrbitSource<K> source(kernel, system, derive_seed(seed, kStreamOrbit));
    const Orbit<K> base = source.fresh();
    parallel_for(kMeasureBatches, workers, [&](std::size_t b) {
      auto state = base.state;
      Rng rng = base.rng;
      K::jump(state, b * batch_len);
      std::uint64_t hits = 0;
      for (std::uint64_t i = 0; i < batch_len; ++i) {
        hits += kernel.hit(state);
        kernel.step(state, rng);
      }
      out[b] = {hits, b == 0 ? source.escapes : 0};
    });
  } else {
    parallel_for(kMeasureBatches, workers, [&](std::size_t b) {
      OrbitSource<K> source(kernel, system, derive_seed(seed, kStreamBatch, b));
      for (;;) {
        auto orbit = source.fresh();
        std::uint64_t hits = 0, i = 0;
        bool alive = true;
        for (; i < batch_len && alive; ++i) {
          hits += kernel.hit(orbit.state);
          alive = kernel.step(orbit.state, orbit.rng);
        }
        if (alive) {
          out[b] = {hits, source.escapes};
          return;
        }
        ++source.escapes;
      }
    });
  }
  return out;
}

MeasureEstimate band_fraction(const System& system, const Point& center, Band band, std::uint64_t iterations,
                              std::uint64_t seed, unsigned workers) {
  if (iterations < 10'000) throw std::invalid_argument("Birkhoff estimates need at least 1e4 iterations");
  const std::uint64_t batch_len = iterations / kMeasureBatches;
  const auto batches = detail::with_kernel(system, kernel_center(system, center), band, [&](const auto& kernel) {
    return run_batches(kernel, system, seed, batch_len, workers);
  });
  MeasureEstimate est;
  est.iterations = batch_len * kMeasureBatches;
  std::vector<double> means;
  std::uint64_t hits = 0;
  for (const auto& b : batches) {
    hits += b.hits;
    est.escapes += b.escapes;
    means.push_back(static_cast<double>(b.hits) / static_cast<double>(batch_len));
  }
  est.value = static_cast<double>(hits) / static_cast<double>(est.iterations);
  double ss = 0.0;
  for (double m : means) ss += (m - est.value) * (m - est.value);
  const double nb = static_cast<double>(kMeasureBatches);
  est.std_error = std::sqrt(ss / (nb - 1.0) / nb);
  return est;
}

}  // namespace

MeasureEstimate estimate_measure(const System& system, const BallTarget& target, std::uint64_t iterations,
                                 std::uint64_t seed, unsigned workers) {
  check_target(system, target);
  MeasureEstimate est = band_fraction(system, target.center, Band::ball(target.radius), iterations, seed, workers);
  if (est.value == 0.0)
    throw EmptyBallError("estimate_measure: no orbit point of " + system.name() + " fell in the ball of radius " +
                         format_double(target.radius));
  return est;
}

MeasureEstimate annulus_measure(const System& system, const Point& x, double r_lo, double r_hi,
                                std::uint64_t iterations, std::uint64_t seed, unsigned workers) {
  if (!system.has_geometry()) throw std::invalid_argument("annulus_measure: " + system.name() + " has no metric");
  if (!(r_lo >= 0.0 && r_hi >= r_lo)) throw std::invalid_argument("annulus_measure: need 0 <= r_lo <= r_hi");
  if (x.size() != system.spec().dimension) throw std::invalid_argument("annulus_measure: center has wrong dimension");
  if (r_lo == r_hi) return {0.0, 0.0, 0, 0};
  return band_fraction(system, x, Band::annulus(r_lo, r_hi), iterations, seed, workers);
}

std::pair<double, double> corona_radii(double r, double delta) {
  if (!(r > 0.0) || !(delta > 0.0)) throw std::invalid_argument("corona_radii: need r > 0, delta > 0");
  return {std::max(0.0, r - std::pow(r, delta)), r};
}

std::pair<double, double> alpha_corona_radii(double r, double alpha, std::size_t p) {
  if (!(r > 0.0) || !(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha_corona_radii: bad r or alpha");
  const double w = std::pow(alpha, static_cast<double>(p));
  return {std::max(0.0, r - w), r + w};
}

HitSeries orbit_hits(const System& system, const BallTarget& target, const Point& y0, std::size_t N,
                     std::uint64_t seed) {
  check_target(system, target);
  if (N < 1) throw std::invalid_argument("orbit_hits: N must be >= 1");
  if (system.has_geometry() && y0.size() != system.spec().dimension)
    throw std::invalid_argument("orbit_hits: start point has the wrong dimension");
  HitSeries out;
  out.target = target;
  out.seed_path = std::to_string(seed);
  out.bits.resize(N);
  detail::with_kernel(system, kernel_center(system, target.center), Band::ball(target.radius),
                      [&](const auto& kernel) {
                        using K = std::decay_t<decltype(kernel)>;
                        Rng rng(seed);
                        typename K::State state{};
                        if constexpr (std::is_same_v<K, detail::IidKernel>) {
                          state = kernel.start(rng);
                        } else if constexpr (std::is_same_v<K, detail::MarkovKernel>) {
                          state = y0.size() > 0 ? kernel.from_point(y0) : kernel.start(rng);
                        } else {
                          state = kernel.from_point(y0);
                        }
                        for (std::size_t j = 0; j < N; ++j) {
                          out.bits[j] = kernel.hit(state);
                          if (j + 1 < N && !kernel.step(state, rng))
                            throw EscapedBasinError("orbit_hits: " + system.name() + " orbit escaped", j + 1);
                        }
                        return 0;
                      });
  return out;
}

namespace {

struct BlockResult {
  std::vector<std::uint32_t> counts;
  std::vector<HitSeries> series;
  std::uint64_t escapes = 0;
};

template <typename K>
BlockResult run_block(const K& kernel, const System& system, const BallTarget& target, std::uint64_t seed,
                      std::size_t block, std::size_t first, std::size_t count, std::size_t window,
                      std::uint64_t gap, std::size_t keep_series, const Orbit<K>* shared_start) {
  BlockResult out;
  out.counts.reserve(count);
  std::vector<std::uint8_t> bits;

  if constexpr (K::kJumpable) {
    // Disjoint stretches of one orbit; the block start is an exact jump.
    const detail::LatticeMatrix skip = detail::LatticeMatrix::power(K::kMatrix, gap);
    auto state = shared_start->state;
    Rng rng = shared_start->rng;
    const std::uint64_t stride = window + gap;
    std::uint64_t origin = first * stride;
    K::jump(state, origin);
    for (std::size_t i = 0; i < count; ++i, origin += stride) {
      std::uint32_t c = 0;
      const bool keep = first + i < keep_series;
      if (keep) bits.assign(window, 0);
      for (std::size_t w = 0; w < window; ++w) {
        const bool h = kernel.hit(state);
        c += h;
        if (keep) bits[w] = h;
        kernel.step(state, rng);
      }
      K::apply(state, skip);
      out.counts.push_back(c);
      if (keep)
        out.series.push_back({bits, origin, target, std::to_string(seed) + "/orbit/" + std::to_string(shared_start->attempt)});
    }
    (void)block;
  } else {
    OrbitSource<K> source(kernel, system, derive_seed(seed, kStreamBlock, block));
    auto orbit = source.fresh();
    std::uint64_t origin = 0;
    for (std::size_t i = 0; i < count;) {
      std::uint32_t c = 0;
      const bool keep = first + i < keep_series;
      if (keep) bits.assign(window, 0);
      bool alive = true;
      for (std::size_t w = 0; w < window && alive; ++w) {
        const bool h = kernel.hit(orbit.state);
        c += h;
        if (keep) bits[w] = h;
        alive = kernel.step(orbit.state, orbit.rng);
      }
      for (std::uint64_t g = 0; g < gap && alive; ++g) alive = kernel.step(orbit.state, orbit.rng);
      if (!alive) {
        ++source.escapes;
        orbit = source.fresh();
        origin = 0;
        continue;
      }
      out.counts.push_back(c);
      if (keep)
        out.series.push_back({bits, origin, target,
                              std::to_string(seed) + "/block/" + std::to_string(block) + "/start/" +
                                  std::to_string(orbit.attempt)});
      origin += window + gap;
      ++i;
    }
    out.escapes = source.escapes;
  }
  return out;
}

}  // namespace

VisitSample sample_visit_counts(const System& system, const BallTarget& target, double t, std::size_t n_samples,
                                std::uint64_t gap, std::uint64_t seed, const VisitSamplingOptions& options) {
  check_target(system, target);
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("sample_visit_counts: t must be > 0");
  if (n_samples < 1) throw std::invalid_argument("sample_visit_counts: need at least one sample");

  VisitSample out;
  out.eps_hat = options.eps_hat ? *options.eps_hat
                                : estimate_measure(system, target, options.measure_iterations,
                                                   derive_seed(seed, 0x6d656173ULL), options.workers);
  if (!(out.eps_hat.value > 0.0)) throw EmptyBallError("sample_visit_counts: ball has zero estimated measure");
  const double n_used = std::floor(t / out.eps_hat.value);
  if (n_used < 1.0) throw std::invalid_argument("sample_visit_counts: floor(t / eps_hat) < 1");
  if (n_used > 4e9) throw ResourceLimitError("sample_visit_counts: window length exceeds 4e9");
  out.N_used = static_cast<std::size_t>(n_used);
  out.n_samples = n_samples;
  out.low_sample_warning = n_samples < 100;
  const std::size_t window = out.N_used + 1;

  const std::size_t blocks = (n_samples + kSamplesPerBlock - 1) / kSamplesPerBlock;
  std::vector<BlockResult> results(blocks);
  detail::with_kernel(system, kernel_center(system, target.center), Band::ball(target.radius),
                      [&](const auto& kernel) {
                        using K = std::decay_t<decltype(kernel)>;
                        std::optional<Orbit<K>> shared;
                        std::uint64_t shared_escapes = 0;
                        if constexpr (K::kJumpable) {
                          OrbitSource<K> source(kernel, system, derive_seed(seed, kStreamOrbit));
                          shared = source.fresh();
                          shared_escapes = source.escapes;
                        }
                        parallel_for(blocks, options.workers, [&](std::size_t b) {
                          const std::size_t first = b * kSamplesPerBlock;
                          const std::size_t count = std::min(kSamplesPerBlock, n_samples - first);
                          results[b] = run_block(kernel, system, target, seed, b, first, count, window, gap,
                                                 options.keep_series, shared ? &*shared : nullptr);
                        });
                        out.escapes += shared_escapes;
                        return 0;
                      });
  out.counts.reserve(n_samples);
  for (auto& r : results) {
    out.counts.insert(out.counts.end(), r.counts.begin(), r.counts.end());
    for (auto& s : r.series) out.series.push_back(std::move(s));
    out.escapes += r.escapes;
  }
  out.empirical = empirical_pmf(out.counts);
  return out;
}

std::vector<Point> sample_orbit_points(const System& system, std::size_t count, std::uint64_t spacing,
                                       std::uint64_t seed) {
  if (!system.has_geometry()) throw std::invalid_argument("sample_orbit_points: " + system.name() + " has no phase space");
  if (spacing < 1) throw std::invalid_argument("sample_orbit_points: spacing must be >= 1");
  const Point origin = Eigen::VectorXd::Zero(system.spec().dimension);
  std::vector<Point> points;
  points.reserve(count);
  detail::with_kernel(system, origin, Band::ball(0.1), [&](const auto& kernel) {
    using K = std::decay_t<decltype(kernel)>;
    OrbitSource<K> source(kernel, system, derive_seed(seed, kStreamPoints));
    auto orbit = source.fresh();
    while (points.size() < count) {
      bool alive = true;
      for (std::uint64_t i = 0; i < spacing && alive; ++i) alive = kernel.step(orbit.state, orbit.rng);
      if (!alive) {
        orbit = source.fresh();
        continue;
      }
      points.push_back(K::to_point(orbit.state));
    }
    return 0;
  });
  return points;
}

}  // namespace pvisit
