#include "pvisit/system.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/SVD>
#include <Eigen/LU>

#include "kernels.hpp"
#include "pvisit/errors.hpp"
#include "pvisit/io.hpp"
#include "pvisit/numeric.hpp"

namespace pvisit {

std::uint64_t to_lattice(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("to_lattice: coordinate is not finite");
  double frac = v - std::floor(v);
  if (frac >= 1.0) frac = 0.0;
  // frac * 2^64 is exact in binary and below 2^64.
  return static_cast<std::uint64_t>(std::ldexp(frac, 64));
}

double from_lattice(std::uint64_t v) {
  const double d = std::ldexp(static_cast<double>(v), -64);
  return d >= 1.0 ? 0.0 : d;
}

double spectral_norm(const Eigen::Matrix2d& m) {
  const double fro2 = m.squaredNorm();
  const double det = m.determinant();
  const double disc = std::sqrt(std::max(0.0, fro2 * fro2 - 4.0 * det * det));
  return std::sqrt(0.5 * (fro2 + disc));
}

System::System(SystemSpec spec, std::shared_ptr<const MarkovBinaryModel> model)
    : spec_(std::move(spec)), model_(std::move(model)) {
  if (!(spec_.A >= 2.0) || !std::isfinite(spec_.A))
    throw std::invalid_argument("System " + spec_.name + ": expansion constant A must be >= 2");
  if (!(spec_.alpha > 0.0 && spec_.alpha < 1.0))
    throw std::invalid_argument("System " + spec_.name + ": alpha must lie in (0, 1)");
  if (spec_.kind == SystemKind::markov && !model_)
    throw std::invalid_argument("System " + spec_.name + ": Markov adapter needs a model");
  if (has_geometry() && spec_.start.size() != spec_.dimension)
    throw std::invalid_argument("System " + spec_.name + ": start point has wrong dimension");
  if (spec_.kind == SystemKind::iid) {
    const double eps = param("eps");
    if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("iid adapter: eps outside [0, 1]");
  }
}

bool System::has_geometry() const { return spec_.kind != SystemKind::iid && spec_.kind != SystemKind::markov; }

double System::param(const std::string& key) const {
  auto it = spec_.params.find(key);
  if (it == spec_.params.end())
    throw std::invalid_argument("System " + spec_.name + ": missing parameter '" + key + "'");
  return it->second;
}

double System::distance(const Point& a, const Point& b) const {
  if (a.size() != b.size()) throw std::invalid_argument("distance: dimension mismatch");
  if (spec_.metric == Metric::euclidean) return (a - b).norm();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    double d = std::abs(a(i) - b(i));
    d -= std::floor(d);
    d = std::min(d, 1.0 - d);
    sum += d * d;
  }
  return std::sqrt(sum);
}

Point System::canonical(const Point& y) const {
  if (spec_.metric != Metric::flat_torus) return y;
  Point out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) out(i) = from_lattice(to_lattice(y(i)));
  return out;
}

Point System::map(const Point& y) const {
  if (!has_geometry()) throw std::invalid_argument("System " + spec_.name + ": stochastic adapter has no map");
  if (y.size() != spec_.dimension) throw std::invalid_argument("System " + spec_.name + ": point has wrong dimension");
  switch (spec_.kind) {
    case SystemKind::cat: {
      auto s = detail::CatKernel::from_point(y);
      Rng unused(0);
      detail::CatKernel::step(s, unused);
      return detail::CatKernel::to_point(s);
    }
    case SystemKind::doubling: {
      // Plain binary doubling; no digits are shifted in.
      return Eigen::VectorXd::Constant(1, from_lattice(to_lattice(y(0)) << 1));
    }
    case SystemKind::henon:
    case SystemKind::lozi: {
      const double a = param("a"), b = param("b");
      const double fx = spec_.kind == SystemKind::lozi ? std::abs(y(0)) : y(0) * y(0);
      Eigen::Vector2d out(1.0 - a * fx + y(1), b * y(0));
      if (!(out.cwiseAbs().maxCoeff() <= spec_.escape_radius))
        throw EscapedBasinError("System " + spec_.name + ": orbit left the escape radius", 1);
      return out;
    }
    default: break;
  }
  throw std::logic_error("System::map: unreachable");
}

Point iterate(const System& system, Point y, std::uint64_t k) {
  if (system.kind() == SystemKind::cat) {
    // Linear on the lattice: jump directly.
    auto s = detail::CatKernel::from_point(y);
    detail::CatKernel::jump(s, k);
    return detail::CatKernel::to_point(s);
  }
  for (std::uint64_t i = 0; i < k; ++i) {
    try {
      y = system.map(y);
    } catch (const EscapedBasinError&) {
      throw EscapedBasinError("iterate: " + system.name() + " orbit escaped", i + 1);
    }
  }
  return y;
}

namespace {

void apply_overrides(SystemSpec& spec, const SystemOverrides& o) {
  for (const auto& [k, v] : o.params) spec.params[k] = v;
  if (o.A) spec.A = *o.A;
  if (o.alpha) spec.alpha = *o.alpha;
  if (o.burn_in) spec.burn_in = *o.burn_in;
  if (o.start) spec.start = *o.start;
  if (o.escape_radius) spec.escape_radius = *o.escape_radius;
}

Eigen::Matrix2d planar_jacobian(SystemKind kind, double a, double b, double x) {
  const double dfx = kind == SystemKind::lozi ? -a * (x >= 0.0 ? 1.0 : -1.0) : -2.0 * a * x;
  Eigen::Matrix2d j;
  j << dfx, 1.0, b, 0.0;
  return j;
}

System planar_map(SystemKind kind, const SystemOverrides& overrides) {
  SystemSpec spec;
  const bool lozi = kind == SystemKind::lozi;
  spec.name = lozi ? "lozi" : "henon";
  spec.kind = kind;
  spec.dimension = 2;
  spec.metric = Metric::euclidean;
  spec.params = lozi ? std::map<std::string, double>{{"a", 1.7}, {"b", 0.5}}
                     : std::map<std::string, double>{{"a", 1.4}, {"b", 0.3}};
  // Rates of the stable direction, from the classical Lyapunov spectra.
  spec.alpha = lozi ? 0.32 : 0.2;
  spec.burn_in = 1000;
  spec.start = Eigen::Vector2d(0.0, 0.0);
  apply_overrides(spec, overrides);
  if (!overrides.A) {
    spec.A = 2.0;  // placeholder so the sampler can run
    System provisional(spec);
    spec.A = estimate_expansion_constant(provisional, 1'000'000, 0x5eed);
  }
  return System(std::move(spec));
}

}  // namespace

double estimate_expansion_constant(const System& system, std::uint64_t samples, std::uint64_t seed) {
  if (system.kind() != SystemKind::henon && system.kind() != SystemKind::lozi)
    throw std::invalid_argument("estimate_expansion_constant: only Hénon and Lozi are sampled");
  const double a = system.param("a"), b = system.param("b");
  // Second derivative: only d^2/dx^2 of the first component, -2a (Hénon) or 0 (Lozi, a.e.).
  const double second = system.kind() == SystemKind::henon ? 2.0 * std::abs(a) : 0.0;
  Point y = system.spec().start;
  Rng rng(seed);
  y(0) += 1e-4 * (rng.uniform() - 0.5);
  y = iterate(system, y, system.spec().burn_in);
  double sup = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const Eigen::Matrix2d jac = planar_jacobian(system.kind(), a, b, y(0));
    const double norm = spectral_norm(jac);
    // ||J^-1|| = sigma_max / |det J| for 2x2 matrices.
    sup = std::max(sup, norm + norm / std::abs(jac.determinant()) + second);
    y = system.map(y);
  }
  return std::max(2.0, 1.1 * sup);
}

System cat_map(const SystemOverrides& overrides) {
  SystemSpec spec;
  spec.name = "cat";
  spec.kind = SystemKind::cat;
  spec.dimension = 2;
  spec.metric = Metric::flat_torus;
  Eigen::Matrix2d m;
  m << 2.0, 1.0, 1.0, 1.0;
  Eigen::JacobiSVD<Eigen::Matrix2d> forward(m), backward(m.inverse());
  spec.A = forward.singularValues()(0) + backward.singularValues()(0);  // D^2 T = 0
  spec.alpha = 1.0 / forward.singularValues()(0);
  spec.burn_in = 0;
  spec.start = Eigen::Vector2d(0.0, 0.0);
  apply_overrides(spec, overrides);
  return System(std::move(spec));
}

System henon_map(const SystemOverrides& overrides) { return planar_map(SystemKind::henon, overrides); }
System lozi_map(const SystemOverrides& overrides) { return planar_map(SystemKind::lozi, overrides); }

System doubling_map(const SystemOverrides& overrides) {
  SystemSpec spec;
  spec.name = "doubling";
  spec.kind = SystemKind::doubling;
  spec.dimension = 1;
  spec.metric = Metric::flat_torus;
  spec.A = 2.5;  // |T'| + |(T^-1)'| on each branch
  spec.alpha = 0.5;
  spec.start = Eigen::VectorXd::Zero(1);
  apply_overrides(spec, overrides);
  return System(std::move(spec));
}

System iid_process(double eps) {
  SystemSpec spec;
  spec.name = "iid:" + format_double(eps);
  spec.kind = SystemKind::iid;
  spec.dimension = 0;
  spec.params = {{"eps", eps}};
  return System(std::move(spec));
}

System markov_process(MarkovBinaryModel model, std::string name) {
  SystemSpec spec;
  spec.name = std::move(name);
  spec.kind = SystemKind::markov;
  spec.dimension = 0;
  spec.params = {{"eps", model.eps()}};
  return System(std::move(spec), std::make_shared<const MarkovBinaryModel>(std::move(model)));
}

System make_system(std::string_view name, const SystemOverrides& overrides) {
  if (name == "cat") return cat_map(overrides);
  if (name == "henon") return henon_map(overrides);
  if (name == "lozi") return lozi_map(overrides);
  if (name == "doubling") return doubling_map(overrides);
  if (name.starts_with("iid:")) {
    const std::string text(name.substr(4));
    std::size_t used = 0;
    double eps = 0.0;
    try {
      eps = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != text.size() || text.empty()) throw std::invalid_argument("make_system: bad eps in '" + std::string(name) + "'");
    return iid_process(eps);
  }
  if (name.starts_with("markov:")) {
    return markov_process(read_model_file(std::string(name.substr(7))), std::string(name));
  }
  throw std::invalid_argument("make_system: unknown system '" + std::string(name) + "'");
}

}  // namespace pvisit
