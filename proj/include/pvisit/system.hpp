#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "pvisit/hit_series.hpp"
#include "pvisit/markov.hpp"

namespace pvisit {

enum class Metric { flat_torus, euclidean };
enum class SystemKind { cat, henon, lozi, doubling, iid, markov };

/// Description of a map (or a synthetic stochastic adapter) together with
/// the constants the bad-center and corona machinery needs.
struct SystemSpec {
  std::string name;
  SystemKind kind = SystemKind::cat;
  int dimension = 2;
  std::map<std::string, double> params;
  Metric metric = Metric::flat_torus;
  /// ||DT|| + ||DT^-1|| + ||D^2 T|| in sup norm; at least 2.
  double A = 2.0;
  /// Contraction rate along stable directions, in (0, 1).
  double alpha = 0.5;
  std::uint64_t burn_in = 0;
  Point start;
  /// Orbits of dissipative maps leaving this sup-norm radius count as escaped.
  double escape_radius = 1e3;
};

/// Optional replacements for registry defaults.
struct SystemOverrides {
  std::map<std::string, double> params;
  std::optional<double> A;
  std::optional<double> alpha;
  std::optional<std::uint64_t> burn_in;
  std::optional<Point> start;
  std::optional<double> escape_radius;
};

class System {
 public:
  System(SystemSpec spec, std::shared_ptr<const MarkovBinaryModel> model = nullptr);

  const SystemSpec& spec() const { return spec_; }
  SystemKind kind() const { return spec_.kind; }
  const std::string& name() const { return spec_.name; }
  /// False for the i.i.d. and Markov adapters, which have no phase space.
  bool has_geometry() const;
  const MarkovBinaryModel* markov_model() const { return model_.get(); }
  double param(const std::string& key) const;

  /// Distance under the system metric (flat torus [0,1)^n or Euclidean).
  double distance(const Point& a, const Point& b) const;
  /// One application of the map. Throws EscapedBasinError when the image
  /// leaves the escape radius and std::invalid_argument for adapters.
  Point map(const Point& y) const;
  /// Reduces torus coordinates into [0, 1); identity otherwise.
  Point canonical(const Point& y) const;

 private:
  SystemSpec spec_;
  std::shared_ptr<const MarkovBinaryModel> model_;
};

/// T^k(y).
Point iterate(const System& system, Point y, std::uint64_t k);

System cat_map(const SystemOverrides& overrides = {});
System henon_map(const SystemOverrides& overrides = {});
System lozi_map(const SystemOverrides& overrides = {});
System doubling_map(const SystemOverrides& overrides = {});
/// Bernoulli(eps) hits regardless of the target.
System iid_process(double eps);
/// Hits are visits of a stationary chain to its hit set.
System markov_process(MarkovBinaryModel model, std::string name = "markov");

/// Registry lookup: cat, henon, lozi, doubling, iid:<eps>, markov:<file>.
System make_system(std::string_view name, const SystemOverrides& overrides = {});

/// Sup over `samples` attractor points of ||DT|| + ||DT^-1|| + ||D^2 T||,
/// scaled up by 10%. Hénon and Lozi only.
double estimate_expansion_constant(const System& system, std::uint64_t samples, std::uint64_t seed);

/// Spectral norm of a 2x2 matrix in closed form.
double spectral_norm(const Eigen::Matrix2d& m);

// Exact fixed-point representation of [0, 1) used for torus orbits.
std::uint64_t to_lattice(double v);
double from_lattice(std::uint64_t v);

}  // namespace pvisit
