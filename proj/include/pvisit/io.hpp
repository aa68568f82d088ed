#pragma once

#include <string>

#include "pvisit/hit_series.hpp"
#include "pvisit/markov.hpp"
#include "pvisit/pmf.hpp"

// JSON encodings. Floats are written with 17 significant digits so every
// file reads back to the identical binary values.
namespace pvisit {

/// {"offset": k, "probs": [...], "mass_declared": m}
std::string pmf_to_json(const Pmf& pmf);
Pmf pmf_from_json(const std::string& text);

/// {"states": K, "transition": [row-major K*K], "stationary": [...] (optional), "hit": [...]}
std::string model_to_json(const MarkovBinaryModel& model);
MarkovBinaryModel model_from_json(const std::string& text);

/// {"bits": "0110...", "origin": n, "target": {"center": [...], "radius": r}, "seed_path": "..."}
std::string hit_series_to_json(const HitSeries& series);
HitSeries hit_series_from_json(const std::string& text);

std::string point_to_text(const Point& p, char sep = ',');
/// Parses "x,y,..." into a point.
Point point_from_text(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

inline Pmf read_pmf_file(const std::string& path) { return pmf_from_json(read_text_file(path)); }
inline MarkovBinaryModel read_model_file(const std::string& path) { return model_from_json(read_text_file(path)); }

}  // namespace pvisit
