#include "pvisit/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#include <json.hpp>

#include "pvisit/errors.hpp"
#include "pvisit/numeric.hpp"

namespace pvisit {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eEin") == std::string::npos) s += ".0";
  return s;
}

namespace {

template <typename Vec>
std::string array_text(const Vec& v) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(v.size()); ++i) {
    if (i) out += ", ";
    out += format_double(v(i));
  }
  return out + "]";
}

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string(what) + ": malformed JSON: " + e.what());
  }
}

template <typename T>
T field(const json& j, const char* key, const char* what) {
  if (!j.contains(key)) throw ValidationError(std::string(what) + ": missing field '" + key + "'");
  if constexpr (std::is_unsigned_v<T>) {
    if (!j.at(key).is_number_unsigned())
      throw ValidationError(std::string(what) + ": field '" + key + "' must be a nonnegative integer");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string(what) + ": bad field '" + key + "': " + e.what());
  }
}

}  // namespace

std::string pmf_to_json(const Pmf& pmf) {
  return "{\"offset\": " + std::to_string(pmf.offset()) + ", \"probs\": " + array_text(pmf.probs()) +
         ", \"mass_declared\": " + format_double(pmf.mass_declared()) + "}";
}

Pmf pmf_from_json(const std::string& text) {
  const json j = parse(text, "PMF");
  const auto probs = field<std::vector<double>>(j, "probs", "PMF");
  const double mass = j.contains("mass_declared") ? field<double>(j, "mass_declared", "PMF") : 1.0;
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(probs.data(), static_cast<Eigen::Index>(probs.size()));
  try {
    return Pmf(field<std::size_t>(j, "offset", "PMF"), std::move(v), mass, 1.0 - mass);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
}

std::string model_to_json(const MarkovBinaryModel& model) {
  const Eigen::MatrixXd& P = model.transition();
  Eigen::RowVectorXd flat(P.size());
  for (Eigen::Index r = 0; r < P.rows(); ++r) flat.segment(r * P.cols(), P.cols()) = P.row(r);
  std::string hit = "[";
  for (std::size_t i = 0; i < model.hit().size(); ++i) hit += (i ? ", " : "") + std::to_string(model.hit()[i]);
  hit += "]";
  return "{\"states\": " + std::to_string(model.states()) + ", \"transition\": " + array_text(flat) +
         ", \"stationary\": " + array_text(model.stationary()) + ", \"hit\": " + hit + "}";
}

MarkovBinaryModel model_from_json(const std::string& text) {
  const json j = parse(text, "model");
  const auto K = field<std::size_t>(j, "states", "model");
  const auto flat = field<std::vector<double>>(j, "transition", "model");
  if (K == 0 || flat.size() != K * K) throw ValidationError("model: transition must hold states^2 entries");
  Eigen::MatrixXd P(K, K);
  for (std::size_t r = 0; r < K; ++r)
    for (std::size_t c = 0; c < K; ++c) P(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = flat[r * K + c];
  std::optional<Eigen::RowVectorXd> pi;
  if (j.contains("stationary") && !j.at("stationary").is_null()) {
    const auto v = field<std::vector<double>>(j, "stationary", "model");
    pi = Eigen::Map<const Eigen::RowVectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  try {
    return MarkovBinaryModel(std::move(P), field<std::vector<std::size_t>>(j, "hit", "model"), pi);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
}

std::string hit_series_to_json(const HitSeries& s) {
  std::string bits;
  bits.reserve(s.bits.size());
  for (auto b : s.bits) bits += b ? '1' : '0';
  return "{\"bits\": \"" + bits + "\", \"origin\": " + std::to_string(s.origin) + ", \"target\": {\"center\": " +
         array_text(s.target.center) + ", \"radius\": " + format_double(s.target.radius) + "}, \"seed_path\": " +
         json(s.seed_path).dump() + "}";
}

HitSeries hit_series_from_json(const std::string& text) {
  const json j = parse(text, "hit series");
  HitSeries s;
  for (char c : field<std::string>(j, "bits", "hit series")) {
    if (c != '0' && c != '1') throw ValidationError("hit series: bits must be a string of 0/1");
    s.bits.push_back(c == '1');
  }
  if (s.bits.empty()) throw ValidationError("hit series: empty bit string");
  s.origin = j.value("origin", std::uint64_t{0});
  if (j.contains("target")) {
    const auto& t = j.at("target");
    const auto c = field<std::vector<double>>(t, "center", "hit series target");
    s.target.center = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
    s.target.radius = field<double>(t, "radius", "hit series target");
  }
  s.seed_path = j.value("seed_path", std::string{});
  return s;
}

std::string point_to_text(const Point& p, char sep) {
  std::string out;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (i) out += sep;
    out += format_double(p(i));
  }
  return out;
}

Point point_from_text(const std::string& text) {
  std::vector<double> coords;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    try {
      coords.push_back(std::stod(item, &used));
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ValidationError("point_from_text: bad coordinate '" + item + "'");
  }
  if (coords.empty()) throw ValidationError("point_from_text: empty point");
  return Eigen::Map<const Eigen::VectorXd>(coords.data(), static_cast<Eigen::Index>(coords.size()));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace pvisit
