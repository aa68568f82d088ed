#include "pvisit/config.hpp"

#include <cstdio>
#include <filesystem>
#include <set>

#include <yaml-cpp/yaml.h>

#include "pvisit/errors.hpp"
#include "pvisit/io.hpp"
#include "pvisit/numeric.hpp"

namespace pvisit {

namespace {

void reject_unknown(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& where) {
  if (!node.IsMap()) throw ValidationError(where + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ValidationError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& where) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ValidationError(where + ": bad value");
  }
}

Point point(const YAML::Node& node, const std::string& where) {
  if (!node.IsSequence() || node.size() == 0) throw ValidationError(where + ": expected a coordinate list");
  Point p(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) p(static_cast<Eigen::Index>(i)) = scalar<double>(node[i], where);
  return p;
}

template <typename T>
std::vector<T> list(const YAML::Node& node, const std::string& where) {
  if (!node.IsSequence()) throw ValidationError(where + ": expected a list");
  std::vector<T> out;
  for (const auto& item : node) out.push_back(scalar<T>(item, where));
  return out;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

ExperimentConfig parse_config(const std::string& yaml_text, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ValidationError(std::string("config: malformed YAML: ") + e.what());
  }
  reject_unknown(root,
                 {"schema", "seed", "system", "targets", "radii", "t", "n_samples", "gap", "measure_iterations",
                  "bound", "output"},
                 "config");
  ExperimentConfig c;
  c.hash = hex64(fnv1a64(yaml_text));
  c.base_dir = base_dir;

  if (!root["schema"]) throw ValidationError("config: missing 'schema'");
  c.schema = scalar<int>(root["schema"], "schema");
  if (c.schema != kConfigSchemaVersion)
    throw ValidationError("config: unsupported schema " + std::to_string(c.schema));
  if (!root["seed"]) throw ValidationError("config: 'seed' is mandatory");
  c.seed = scalar<std::uint64_t>(root["seed"], "seed");

  const YAML::Node sys = root["system"];
  if (!sys) throw ValidationError("config: missing 'system'");
  if (sys.IsScalar()) {
    c.system = sys.as<std::string>();
  } else {
    reject_unknown(sys, {"name", "params", "A", "alpha", "burn_in", "start", "escape_radius"}, "system");
    if (!sys["name"]) throw ValidationError("system: missing 'name'");
    c.system = scalar<std::string>(sys["name"], "system.name");
    if (sys["params"]) {
      if (!sys["params"].IsMap()) throw ValidationError("system.params: expected a mapping");
      for (const auto& kv : sys["params"])
        c.overrides.params[kv.first.as<std::string>()] = scalar<double>(kv.second, "system.params");
    }
    if (sys["A"]) c.overrides.A = scalar<double>(sys["A"], "system.A");
    if (sys["alpha"]) c.overrides.alpha = scalar<double>(sys["alpha"], "system.alpha");
    if (sys["burn_in"]) c.overrides.burn_in = scalar<std::uint64_t>(sys["burn_in"], "system.burn_in");
    if (sys["start"]) c.overrides.start = point(sys["start"], "system.start");
    if (sys["escape_radius"]) c.overrides.escape_radius = scalar<double>(sys["escape_radius"], "system.escape_radius");
  }

  if (const YAML::Node targets = root["targets"]) {
    reject_unknown(targets, {"centers", "sampled", "spacing"}, "targets");
    if (targets["centers"]) {
      if (!targets["centers"].IsSequence()) throw ValidationError("targets.centers: expected a list");
      for (const auto& p : targets["centers"]) c.centers.push_back(point(p, "targets.centers"));
    }
    if (targets["sampled"]) c.sampled_centers = scalar<std::size_t>(targets["sampled"], "targets.sampled");
    if (targets["spacing"]) c.center_spacing = scalar<std::uint64_t>(targets["spacing"], "targets.spacing");
  }

  if (!root["radii"]) throw ValidationError("config: missing 'radii'");
  c.radii = list<double>(root["radii"], "radii");
  if (c.radii.empty()) throw ValidationError("radii: list is empty");
  for (std::size_t i = 0; i < c.radii.size(); ++i) {
    if (!(c.radii[i] > 0.0 && c.radii[i] < 1.0)) throw ValidationError("radii: every radius must lie in (0, 1)");
    if (i > 0 && !(c.radii[i] < c.radii[i - 1])) throw ValidationError("radii: must be strictly decreasing");
  }

  if (root["t"]) c.t = scalar<double>(root["t"], "t");
  if (!(c.t > 0.0)) throw ValidationError("t: must be > 0");
  if (!root["n_samples"]) throw ValidationError("config: missing 'n_samples'");
  c.n_samples = scalar<std::size_t>(root["n_samples"], "n_samples");
  if (c.n_samples < 1) throw ValidationError("n_samples: must be >= 1");
  if (root["gap"]) c.gap = scalar<std::uint64_t>(root["gap"], "gap");
  if (root["measure_iterations"])
    c.measure_iterations = scalar<std::uint64_t>(root["measure_iterations"], "measure_iterations");
  if (c.measure_iterations < 10'000) throw ValidationError("measure_iterations: must be >= 1e4");

  if (const YAML::Node bound = root["bound"]) {
    reject_unknown(bound, {"p", "M", "max_series", "max_window"}, "bound");
    if (bound["p"]) c.bound.p = list<std::size_t>(bound["p"], "bound.p");
    if (bound["M"]) c.bound.M = list<std::size_t>(bound["M"], "bound.M");
    if (bound["max_series"]) c.bound.max_series = scalar<std::size_t>(bound["max_series"], "bound.max_series");
    if (bound["max_window"]) c.bound.max_window = scalar<std::size_t>(bound["max_window"], "bound.max_window");
    for (auto p : c.bound.p)
      if (p < 2) throw ValidationError("bound.p: values must be >= 2");
    for (auto m : c.bound.M)
      if (m < 1) throw ValidationError("bound.M: values must be >= 1");
  }

  const YAML::Node output = root["output"];
  if (!output) throw ValidationError("config: missing 'output'");
  reject_unknown(output, {"path", "format"}, "output");
  if (!output["path"]) throw ValidationError("output: missing 'path'");
  c.output_path = scalar<std::string>(output["path"], "output.path");
  if (output["format"]) c.output_format = scalar<std::string>(output["format"], "output.format");
  if (c.output_format != "csv") throw ValidationError("output.format: only 'csv' is supported");

  // Resolve the system now so bad names or parameters fail before any work.
  const System system = config_system(c);
  if (system.has_geometry()) {
    if (c.centers.empty() && c.sampled_centers == 0)
      throw ValidationError("targets: give explicit centers or a sampled count");
    for (const auto& p : c.centers)
      if (p.size() != system.spec().dimension) throw ValidationError("targets.centers: wrong dimension");
  } else if (c.sampled_centers > 0) {
    throw ValidationError("targets.sampled: " + system.name() + " has no phase space to sample");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  const std::string dir = std::filesystem::path(path).parent_path().string();
  return parse_config(read_text_file(path), dir.empty() ? "." : dir);
}

System config_system(const ExperimentConfig& config) {
  std::string name = config.system;
  if (name.starts_with("markov:")) {
    std::filesystem::path file(name.substr(7));
    if (file.is_relative()) file = std::filesystem::path(config.base_dir) / file;
    name = "markov:" + file.string();
  }
  try {
    return make_system(name, config.overrides);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("system: ") + e.what());
  }
}

}  // namespace pvisit
