#pragma once

// Expression spec file (JSON), mirroring ExpressionSpec:
//
//   {"name": "...", "effort": {"time", "space", "flow", "weight"},
//    "shape": {"form", "quality", "mode"},
//    "retreat": {"count_per_segment", "depth_fraction", "pause_s", "jitter_seed", "jitter_amount"},
//    "duration_s": 12}
//
// A "preset" key expands to that preset first; any other keys present then
// override the preset's fields. Missing fields keep their defaults.

#include "expressive/laban.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <string>

namespace expressive::laban {

inline nlohmann::ordered_json spec_to_json(const ExpressionSpec& s) {
  nlohmann::ordered_json j;
  j["name"] = s.name;
  j["effort"] = {{"time", to_string(s.effort.time)},
                 {"space", to_string(s.effort.space)},
                 {"flow", to_string(s.effort.flow)},
                 {"weight", to_string(s.effort.weight)}};
  j["shape"] = {{"form", to_string(s.shape.form)},
                {"quality", to_string(s.shape.quality)},
                {"mode", to_string(s.shape.mode)}};
  j["retreat"] = {{"count_per_segment", s.retreat.count_per_segment},
                  {"depth_fraction", s.retreat.depth_fraction},
                  {"pause_s", s.retreat.pause_s},
                  {"jitter_seed", s.retreat.jitter_seed},
                  {"jitter_amount", s.retreat.jitter_amount}};
  j["duration_s"] = s.duration_s;
  return j;
}

namespace detail {

template <typename T>
void read_field(const nlohmann::json& obj, const char* key, T& out, const std::string& path) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InputError(path + "." + key + ": wrong type");
  }
}

template <typename Parse, typename T>
void read_enum(const nlohmann::json& obj, const char* key, T& out, Parse parse, const std::string& path) {
  if (!obj.contains(key)) return;
  if (!obj.at(key).is_string()) throw InputError(path + "." + key + ": expected a string");
  try {
    out = parse(obj.at(key).get<std::string>());
  } catch (const InputError& e) {
    throw InputError(path + "." + key + ": " + e.what());
  }
}

}  // namespace detail

inline ExpressionSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("spec: expected an object");
  ExpressionSpec s;
  if (j.contains("preset")) {
    if (!j.at("preset").is_string()) throw InputError("spec.preset: expected a string");
    s = preset(j.at("preset").get<std::string>());
  }
  detail::read_field(j, "name", s.name, "spec");
  if (j.contains("effort")) {
    const auto& e = j.at("effort");
    if (!e.is_object()) throw InputError("spec.effort: expected an object");
    detail::read_enum(e, "time", s.effort.time, parse_time, "effort");
    detail::read_enum(e, "space", s.effort.space, parse_space, "effort");
    detail::read_enum(e, "flow", s.effort.flow, parse_flow, "effort");
    detail::read_enum(e, "weight", s.effort.weight, parse_weight, "effort");
    // A changed Time without an explicit duration takes that Time's default.
    if (e.contains("time") && !j.contains("duration_s")) s.duration_s = default_duration(s.effort.time);
  }
  if (j.contains("shape")) {
    const auto& sh = j.at("shape");
    if (!sh.is_object()) throw InputError("spec.shape: expected an object");
    detail::read_enum(sh, "form", s.shape.form, parse_form, "shape");
    detail::read_enum(sh, "quality", s.shape.quality, parse_quality, "shape");
    detail::read_enum(sh, "mode", s.shape.mode, parse_mode, "shape");
  }
  if (j.contains("retreat")) {
    const auto& r = j.at("retreat");
    if (!r.is_object()) throw InputError("spec.retreat: expected an object");
    detail::read_field(r, "count_per_segment", s.retreat.count_per_segment, "retreat");
    detail::read_field(r, "depth_fraction", s.retreat.depth_fraction, "retreat");
    detail::read_field(r, "pause_s", s.retreat.pause_s, "retreat");
    detail::read_field(r, "jitter_seed", s.retreat.jitter_seed, "retreat");
    detail::read_field(r, "jitter_amount", s.retreat.jitter_amount, "retreat");
  }
  detail::read_field(j, "duration_s", s.duration_s, "spec");
  if (s.name.empty()) s.name = "custom";
  return s;
}

inline ExpressionSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open spec file '" + path + "'");
  try {
    return spec_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("spec file '" + path + "': " + e.what());
  }
}

/// FNV-1a over the canonical JSON form; 16 lowercase hex digits.
inline std::string spec_hash(const ExpressionSpec& s) {
  const std::string text = spec_to_json(s).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 0xf];
  return out;
}

}  // namespace expressive::laban
