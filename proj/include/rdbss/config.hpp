#pragma once

// JSON configuration files (comments allowed). Every section is optional and
// only overrides the keys it names; unknown keys are rejected.

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "rdbss/pipeline.hpp"
#include "rdbss/roomsim.hpp"

namespace rdbss {

using Json = nlohmann::json;

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  try {
    return Json::parse(in, nullptr, true, true);
  } catch (const Json::parse_error& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

namespace detail {

inline void check_keys(const Json& j, const std::string& section,
                       std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError("section '" + section + "' must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in section '" + section + "'");
  }
}

template <class T>
void read(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <class T>
void read(const Json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    out.reset();
    return;
  }
  T v{};
  read(j, key, v);
  out = v;
}

inline Vec3 read_vec3(const Json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(what + " must be a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline std::vector<Vec3> read_points(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + " must be an array of points");
  std::vector<Vec3> pts;
  for (const auto& p : j) pts.push_back(read_vec3(p, what));
  return pts;
}

} // namespace detail

inline void apply_json(const Json& j, SearchConfig& c) {
  detail::check_keys(j, "search", {"iterations", "probes", "starting_scale", "end_scale",
                                   "subspace_dim", "line_search_exponents", "seed"});
  detail::read(j, "iterations", c.iterations);
  detail::read(j, "probes", c.probes);
  detail::read(j, "starting_scale", c.starting_scale);
  detail::read(j, "end_scale", c.end_scale);
  detail::read(j, "subspace_dim", c.subspace_dim);
  detail::read(j, "seed", c.seed);
  if (j.contains("line_search_exponents")) {
    const auto& r = j.at("line_search_exponents");
    if (!r.is_array() || r.size() != 2) throw ConfigError("line_search_exponents must be [min, max]");
    c.min_exponent = r[0].get<int>();
    c.max_exponent = r[1].get<int>();
  }
}

inline void apply_json(const Json& j, ObjectiveConfig& c) {
  detail::check_keys(j, "objective", {"lambda", "histogram_bins", "histogram_range", "epsilon",
                                      "block_size", "leak", "max_blocks", "divergence",
                                      "envelope_frame"});
  detail::read(j, "lambda", c.lambda);
  detail::read(j, "histogram_bins", c.histogram_bins);
  detail::read(j, "histogram_range", c.histogram_range);
  detail::read(j, "epsilon", c.epsilon);
  detail::read(j, "block_size", c.block_size);
  detail::read(j, "leak", c.leak);
  detail::read(j, "max_blocks", c.max_blocks);
  detail::read(j, "envelope_frame", c.envelope_frame);
  if (j.contains("divergence")) c.divergence = divergence_from_string(j.at("divergence").get<std::string>());
}

inline void apply_json(const Json& j, RunConfig& c) {
  detail::check_keys(j, "run", {"mode", "sources", "chunk_size", "reoptimize_period", "repeats",
                                "max_delay", "projection_length", "workers", "clock", "pace",
                                "publish", "kernel"});
  if (j.contains("mode")) c.mode = run_mode_from_string(j.at("mode").get<std::string>());
  if (j.contains("clock")) c.clock = clock_mode_from_string(j.at("clock").get<std::string>());
  if (j.contains("kernel")) c.kernel = delay_kernel_from_string(j.at("kernel").get<std::string>());
  detail::read(j, "sources", c.sources);
  detail::read(j, "chunk_size", c.chunk_size);
  detail::read(j, "reoptimize_period", c.reoptimize_period);
  detail::read(j, "repeats", c.repeats);
  detail::read(j, "max_delay", c.max_delay);
  detail::read(j, "projection_length", c.projection_length);
  detail::read(j, "workers", c.workers);
  detail::read(j, "pace", c.pace);
  detail::read(j, "publish", c.publish);
}

/// Room section. Microphones come from "mics" or from "preset" around
/// "array_center" with "array_size".
inline void apply_json(const Json& j, RoomSpec& room) {
  detail::check_keys(j, "room", {"dimensions", "rt60", "sources", "mics", "preset", "array_center",
                                 "array_size", "sample_rate", "max_image_order", "speed_of_sound",
                                 "kernel"});
  if (j.contains("dimensions")) room.dimensions = detail::read_vec3(j.at("dimensions"), "dimensions");
  detail::read(j, "rt60", room.rt60);
  detail::read(j, "sample_rate", room.sample_rate);
  detail::read(j, "max_image_order", room.max_image_order);
  detail::read(j, "speed_of_sound", room.speed_of_sound);
  if (j.contains("kernel")) room.kernel = delay_kernel_from_string(j.at("kernel").get<std::string>());
  if (j.contains("sources")) room.source_positions = detail::read_points(j.at("sources"), "sources");
  if (j.contains("mics") && j.contains("preset")) {
    throw ConfigError("room: give either 'mics' or 'preset', not both");
  }
  if (j.contains("mics")) room.mic_positions = detail::read_points(j.at("mics"), "mics");
  if (j.contains("preset")) {
    Vec3 center{3.1, 2.1, 1.2};
    double size = 0.2;
    if (j.contains("array_center")) center = detail::read_vec3(j.at("array_center"), "array_center");
    detail::read(j, "array_size", size);
    room.mic_positions = mic_array(preset_from_string(j.at("preset").get<std::string>()), center, size);
  }
}

/// Top level: optional "search", "objective", "run" and "room" sections.
inline void check_document(const Json& doc) {
  detail::check_keys(doc, "top level", {"search", "objective", "run", "room"});
}

inline void apply_run_config(const Json& doc, RunConfig& cfg) {
  check_document(doc);
  if (doc.contains("search")) apply_json(doc.at("search"), cfg.search);
  if (doc.contains("objective")) apply_json(doc.at("objective"), cfg.objective);
  if (doc.contains("run")) apply_json(doc.at("run"), cfg);
}

/// {"items": [{"name", "files" | "synthetic_seed", "seconds"}], "presets": [...],
///  "room": {...}} with file paths relative to the manifest.
inline Manifest parse_manifest(const Json& j) {
  detail::check_keys(j, "manifest", {"items", "presets", "room"});
  Manifest m;
  if (!j.contains("items") || !j.at("items").is_array() || j.at("items").empty()) {
    throw ConfigError("manifest needs a non-empty 'items' array");
  }
  for (const auto& it : j.at("items")) {
    detail::check_keys(it, "item", {"name", "files", "synthetic_seed", "seconds"});
    ManifestItem item;
    detail::read(it, "name", item.name);
    detail::read(it, "files", item.files);
    detail::read(it, "synthetic_seed", item.synthetic_seed);
    detail::read(it, "seconds", item.seconds);
    if (item.name.empty()) item.name = "item" + std::to_string(m.items.size() + 1);
    if (item.files.empty() && !item.synthetic_seed) {
      throw ConfigError("item '" + item.name + "' needs 'files' or 'synthetic_seed'");
    }
    m.items.push_back(std::move(item));
  }
  if (j.contains("presets")) {
    m.presets.clear();
    for (const auto& p : j.at("presets")) m.presets.push_back(preset_from_string(p.get<std::string>()));
  }
  if (j.contains("room")) {
    const auto& r = j.at("room");
    if (r.contains("mics")) throw ConfigError("manifest room takes presets, not explicit mics");
    Json rest = r;
    if (r.contains("array_center")) m.array_center = detail::read_vec3(r.at("array_center"), "array_center");
    detail::read(r, "array_size", m.array_size);
    rest.erase("array_center");
    rest.erase("array_size");
    rest.erase("preset");
    apply_json(rest, m.room);
  }
  return m;
}

} // namespace rdbss
