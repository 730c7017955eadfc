#pragma once

// Laban Effort / Shape vocabulary, the six expression presets and the Shape
// Form posture targets for the default chain.

#include "expressive/error.hpp"
#include "expressive/kinematics.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace expressive::laban {

enum class Time { Sustained, Sudden };
enum class Space { Direct, Indirect };
enum class Flow { Bound, Free };
enum class Weight { Strong, Light };

enum class ShapeForm { Wall, Ball, Screw, Pin };
enum class ShapeQuality { None, Retreating };
enum class ChangeMode { None, SpokeLike, ArcLike };

enum class Expression { Happy, Sad, Shy, Angry, SpokeHesitant, ArcHesitant };

inline constexpr std::array kAllExpressions = {Expression::Happy, Expression::Sad,           Expression::Shy,
                                               Expression::Angry, Expression::SpokeHesitant, Expression::ArcHesitant};

struct EffortSettings {
  Time time = Time::Sustained;
  Space space = Space::Direct;
  Flow flow = Flow::Bound;
  Weight weight = Weight::Strong;

  bool operator==(const EffortSettings&) const = default;
};

struct ShapeSettings {
  ShapeForm form = ShapeForm::Wall;
  ShapeQuality quality = ShapeQuality::None;
  ChangeMode mode = ChangeMode::None;

  bool operator==(const ShapeSettings&) const = default;
};

struct RetreatParams {
  int count_per_segment = 0;
  double depth_fraction = 0.35;  ///< share of the leg progress undone by each retreat
  double pause_s = 0.25;         ///< dwell at each reversal
  std::uint64_t jitter_seed = 0;
  double jitter_amount = 0.0;  ///< 0 places retreats evenly

  bool operator==(const RetreatParams&) const = default;
};

struct ExpressionSpec {
  std::string name;
  EffortSettings effort;
  ShapeSettings shape;
  RetreatParams retreat;
  double duration_s = 12.0;

  bool operator==(const ExpressionSpec&) const = default;
};

inline constexpr double kSustainedDuration = 12.0;
inline constexpr double kSuddenDuration = 4.0;
inline constexpr int kDefaultRetreatCount = 2;

inline double default_duration(Time t) { return t == Time::Sustained ? kSustainedDuration : kSuddenDuration; }

// ---- names ---------------------------------------------------------------

inline std::string_view to_string(Time v) { return v == Time::Sustained ? "Sustained" : "Sudden"; }
inline std::string_view to_string(Space v) { return v == Space::Direct ? "Direct" : "Indirect"; }
inline std::string_view to_string(Flow v) { return v == Flow::Bound ? "Bound" : "Free"; }
inline std::string_view to_string(Weight v) { return v == Weight::Strong ? "Strong" : "Light"; }
inline std::string_view to_string(ShapeQuality v) { return v == ShapeQuality::None ? "None" : "Retreating"; }

inline std::string_view to_string(ShapeForm v) {
  switch (v) {
    case ShapeForm::Wall: return "Wall";
    case ShapeForm::Ball: return "Ball";
    case ShapeForm::Screw: return "Screw";
    case ShapeForm::Pin: return "Pin";
  }
  return "?";
}

inline std::string_view to_string(ChangeMode v) {
  switch (v) {
    case ChangeMode::None: return "None";
    case ChangeMode::SpokeLike: return "SpokeLike";
    case ChangeMode::ArcLike: return "ArcLike";
  }
  return "?";
}

inline std::string_view to_string(Expression v) {
  switch (v) {
    case Expression::Happy: return "Happy";
    case Expression::Sad: return "Sad";
    case Expression::Shy: return "Shy";
    case Expression::Angry: return "Angry";
    case Expression::SpokeHesitant: return "SpokeHesitant";
    case Expression::ArcHesitant: return "ArcHesitant";
  }
  return "?";
}

namespace detail {

/// Lowercase with spaces, hyphens and underscores removed: "Spoke-Like Hesitant"
/// and "spokelikehesitant" compare equal.
inline std::string fold(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == ' ' || c == '-' || c == '_') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

template <typename E, std::size_t N>
std::optional<E> parse_enum(std::string_view s, const std::array<E, N>& values) {
  const auto f = fold(s);
  for (E v : values)
    if (fold(to_string(v)) == f) return v;
  return std::nullopt;
}

template <typename E, std::size_t N>
E parse_or_throw(std::string_view s, const std::array<E, N>& values, std::string_view what) {
  if (auto v = parse_enum(s, values)) return *v;
  std::string msg = "unknown " + std::string(what) + " '" + std::string(s) + "'; valid:";
  for (E v : values) msg += " " + std::string(to_string(v));
  throw InputError(msg);
}

}  // namespace detail

inline Time parse_time(std::string_view s) {
  return detail::parse_or_throw(s, std::array{Time::Sustained, Time::Sudden}, "time");
}
inline Space parse_space(std::string_view s) {
  return detail::parse_or_throw(s, std::array{Space::Direct, Space::Indirect}, "space");
}
inline Flow parse_flow(std::string_view s) {
  return detail::parse_or_throw(s, std::array{Flow::Bound, Flow::Free}, "flow");
}
inline Weight parse_weight(std::string_view s) {
  return detail::parse_or_throw(s, std::array{Weight::Strong, Weight::Light}, "weight");
}
inline ShapeForm parse_form(std::string_view s) {
  return detail::parse_or_throw(s, std::array{ShapeForm::Wall, ShapeForm::Ball, ShapeForm::Screw, ShapeForm::Pin},
                                "shape form");
}
inline ShapeQuality parse_quality(std::string_view s) {
  return detail::parse_or_throw(s, std::array{ShapeQuality::None, ShapeQuality::Retreating}, "shape quality");
}
inline ChangeMode parse_mode(std::string_view s) {
  return detail::parse_or_throw(s, std::array{ChangeMode::None, ChangeMode::SpokeLike, ChangeMode::ArcLike},
                                "mode");
}

/// Accepts the tag ("SpokeHesitant") and the long form ("Spoke-Like Hesitant").
inline Expression parse_expression(std::string_view s) {
  const auto f = detail::fold(s);
  if (f == "spokelikehesitant") return Expression::SpokeHesitant;
  if (f == "arclikehesitant") return Expression::ArcHesitant;
  return detail::parse_or_throw(s, kAllExpressions, "expression");
}

inline std::optional<Expression> try_parse_expression(std::string_view s) {
  try {
    return parse_expression(s);
  } catch (const InputError&) {
    return std::nullopt;
  }
}

// ---- presets -------------------------------------------------------------

/// The fixed Effort + Shape combination for each expression. Weight is Strong
/// throughout; Shy and SpokeHesitant differ only in Shape Quality and mode.
inline ExpressionSpec preset(Expression e) {
  ExpressionSpec s;
  s.name = std::string(to_string(e));
  switch (e) {
    case Expression::Happy:
      s.effort = {Time::Sudden, Space::Indirect, Flow::Free, Weight::Strong};
      s.shape = {ShapeForm::Wall, ShapeQuality::None, ChangeMode::None};
      break;
    case Expression::Sad:
      s.effort = {Time::Sustained, Space::Direct, Flow::Bound, Weight::Strong};
      s.shape = {ShapeForm::Ball, ShapeQuality::None, ChangeMode::None};
      break;
    case Expression::Shy:
      s.effort = {Time::Sustained, Space::Direct, Flow::Bound, Weight::Strong};
      s.shape = {ShapeForm::Screw, ShapeQuality::None, ChangeMode::None};
      break;
    case Expression::Angry:
      s.effort = {Time::Sudden, Space::Direct, Flow::Bound, Weight::Strong};
      s.shape = {ShapeForm::Pin, ShapeQuality::None, ChangeMode::None};
      break;
    case Expression::SpokeHesitant:
      s.effort = {Time::Sustained, Space::Direct, Flow::Bound, Weight::Strong};
      s.shape = {ShapeForm::Screw, ShapeQuality::Retreating, ChangeMode::SpokeLike};
      s.retreat.count_per_segment = kDefaultRetreatCount;
      break;
    case Expression::ArcHesitant:
      s.effort = {Time::Sustained, Space::Indirect, Flow::Free, Weight::Strong};
      s.shape = {ShapeForm::Screw, ShapeQuality::Retreating, ChangeMode::ArcLike};
      s.retreat.count_per_segment = kDefaultRetreatCount;
      break;
  }
  s.duration_s = default_duration(s.effort.time);
  return s;
}

inline ExpressionSpec preset(std::string_view name) { return preset(parse_expression(name)); }

// ---- validation ----------------------------------------------------------

struct Issue {
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<Issue> errors;
  std::vector<Issue> warnings;

  bool ok() const { return errors.empty(); }
  bool empty() const { return errors.empty() && warnings.empty(); }
};

/// Number of reversal dwells on a three-leg circuit.
inline int pause_count(const ExpressionSpec& spec) {
  return spec.shape.quality == ShapeQuality::Retreating ? 2 * spec.retreat.count_per_segment * 3 : 0;
}

/**
 * Structural violations become errors. Combinations that depart from the
 * pairings used by the presets (ArcLike with Direct/Bound, SpokeLike with
 * Indirect/Free) are only warnings so the authoring UI can explore them.
 */
inline ValidationReport validate_spec(const ExpressionSpec& spec) {
  ValidationReport r;
  const auto& sh = spec.shape;
  const auto& rt = spec.retreat;
  if (sh.mode != ChangeMode::None && sh.quality != ShapeQuality::Retreating)
    r.errors.push_back({"shape.mode", "mode requires Retreating"});
  if (sh.quality == ShapeQuality::Retreating && sh.mode == ChangeMode::None)
    r.errors.push_back({"shape.mode", "Retreating requires a SpokeLike or ArcLike mode"});
  if (!(spec.duration_s > 0.0) || !std::isfinite(spec.duration_s))
    r.errors.push_back({"duration_s", "duration must be positive"});
  if (rt.count_per_segment < 0) r.errors.push_back({"retreat.count_per_segment", "count must be non-negative"});
  if (sh.quality == ShapeQuality::None && rt.count_per_segment != 0)
    r.errors.push_back({"retreat.count_per_segment", "count must be 0 without Retreating"});
  if (!(rt.depth_fraction > 0.0 && rt.depth_fraction < 1.0))
    r.errors.push_back({"retreat.depth_fraction", "depth_fraction must lie in (0, 1)"});
  if (!(rt.pause_s >= 0.0) || !std::isfinite(rt.pause_s))
    r.errors.push_back({"retreat.pause_s", "pause must be non-negative"});
  if (!(rt.jitter_amount >= 0.0 && rt.jitter_amount < 1.0))
    r.errors.push_back({"retreat.jitter_amount", "jitter_amount must lie in [0, 1)"});
  if (r.errors.empty() && pause_count(spec) * rt.pause_s >= spec.duration_s)
    r.errors.push_back({"retreat.pause_s", "reversal dwells leave no time for motion"});

  if (sh.mode == ChangeMode::ArcLike) {
    if (spec.effort.space == Space::Direct)
      r.warnings.push_back({"effort.space", "ArcLike retreats are normally paired with Indirect space"});
    if (spec.effort.flow == Flow::Bound)
      r.warnings.push_back({"effort.flow", "ArcLike retreats are normally paired with Free flow"});
  }
  if (sh.mode == ChangeMode::SpokeLike) {
    if (spec.effort.space == Space::Indirect)
      r.warnings.push_back({"effort.space", "SpokeLike retreats are normally paired with Direct space"});
    if (spec.effort.flow == Flow::Free)
      r.warnings.push_back({"effort.flow", "SpokeLike retreats are normally paired with Bound flow"});
  }
  return r;
}

// ---- Shape Form postures -------------------------------------------------

struct PostureTarget {
  ShapeForm form = ShapeForm::Wall;
  kinematics::JointConfig q_ref;
  double ee_pitch_deg = 0.0;  ///< elevation of the tool approach axis; -90 points straight down
};

/**
 * Reference postures for the default chain. Each was solved once so that the
 * end effector sits at the default scene centroid (0.5, 0, 0.4) m with the
 * listed approach pitch, staying as close as the kinematics allow to:
 *   Wall:  upper arm raised, tool tilted 45 deg between horizontal and vertical
 *   Ball:  every joint curled inward (large elbow and wrist flexion)
 *   Screw: torso leaning in, tool facing straight down
 *   Pin:   shoulder pitched forward, elbow opened toward the kinosphere edge, 45 deg tool
 * The last joint is held at 0.785 rad (hand square to the arm) for all forms.
 */
inline PostureTarget posture_for(ShapeForm form) {
  switch (form) {
    case ShapeForm::Wall: return {form, {0.0, -0.462, 0.0, -2.681, 0.0, 3.005, 0.785}, -45.0};
    case ShapeForm::Ball: return {form, {0.0, -0.403, 0.0, -2.795, 0.0, 3.430, 0.785}, -30.5};
    case ShapeForm::Screw: return {form, {0.0, -0.187, 0.0, -2.093, 0.0, 1.906, 0.785}, -90.0};
    case ShapeForm::Pin: return {form, {0.0, 0.381, 0.0, -1.362, 0.0, 0.958, 0.785}, -45.0};
  }
  throw InputError("unknown shape form");
}

/// Elevation (deg) of the tool z axis for a pose.
inline double approach_pitch_deg(const kinematics::Pose& pose) {
  const kinematics::Vector3 approach = pose.orientation * kinematics::Vector3::UnitZ();
  return std::asin(std::clamp(approach.z(), -1.0, 1.0)) * 180.0 / std::numbers::pi;
}

}  // namespace expressive::laban
