#pragma once

// Cartesian path for one A -> B -> C -> A circuit.
//
// Each leg is a straight chord (Direct space) or a circular arc whose sagitta
// is a fixed share of the chord (Indirect space). Free flow splits every leg
// at interior via-points; Retreating inserts backward segments that undo part
// of the leg progress before the leg resumes.
//
// Leg progress u in [0, 1] is the arc-length fraction along the leg curve.

#include "expressive/error.hpp"
#include "expressive/laban.hpp"
#include "expressive/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

namespace expressive::synthesis {

enum class SegmentKind { Advance, Retreat };
enum class SegmentGeometry { Line, Arc };

inline std::string_view to_string(SegmentKind k) { return k == SegmentKind::Advance ? "Advance" : "Retreat"; }

struct PathConfig {
  double sagitta_ratio = 0.15;
  int free_via_count = 2;
};

/// Circle through three points, parameterized by swept angle from start to end.
struct CircularArc {
  Vector3 center = Vector3::Zero();
  Vector3 e1 = Vector3::UnitX();
  Vector3 e2 = Vector3::UnitY();
  double radius = 0.0;
  double sweep = 0.0;

  static std::optional<CircularArc> through(const Vector3& start, const Vector3& via, const Vector3& end) {
    const Vector3 a = start - end;
    const Vector3 b = via - end;
    const Vector3 axb = a.cross(b);
    const double denom = 2.0 * axb.squaredNorm();
    if (denom < 1e-24) return std::nullopt;
    CircularArc arc;
    arc.center = end + (a.squaredNorm() * b - b.squaredNorm() * a).cross(axb) / denom;
    const Vector3 r0 = start - arc.center;
    arc.radius = r0.norm();
    arc.e1 = r0 / arc.radius;
    const Vector3 n = (via - start).cross(end - via).normalized();
    arc.e2 = n.cross(arc.e1);
    const Vector3 rw = end - arc.center;
    double theta = std::atan2(rw.dot(arc.e2), rw.dot(arc.e1));
    if (theta <= 0.0) theta += 2.0 * std::numbers::pi;
    arc.sweep = theta;
    return arc;
  }

  Vector3 at(double f) const {
    const double t = f * sweep;
    return center + radius * (std::cos(t) * e1 + std::sin(t) * e2);
  }
  double length() const { return radius * sweep; }
};

struct PathSegment {
  SegmentKind kind = SegmentKind::Advance;
  SegmentGeometry geometry = SegmentGeometry::Line;
  Vector3 start = Vector3::Zero();
  Vector3 end = Vector3::Zero();
  Vector3 via = Vector3::Zero();  ///< arc only: point halfway along the arc
  int leg = 0;                    ///< 0: A->B, 1: B->C, 2: C->A
  double u_start = 0.0;           ///< leg progress at start and end
  double u_end = 0.0;

  /// f in [0, 1] is the arc-length fraction; the endpoints are returned exactly.
  Vector3 at(double f) const {
    if (f <= 0.0) return start;
    if (f >= 1.0) return end;
    if (geometry == SegmentGeometry::Arc) {
      if (auto arc = CircularArc::through(start, via, end)) return arc->at(f);
    }
    return start + f * (end - start);
  }

  double length() const {
    if (geometry == SegmentGeometry::Arc) {
      if (auto arc = CircularArc::through(start, via, end)) return arc->length();
    }
    return (end - start).norm();
  }
};

/// One leg of the circuit: chord a -> b, optionally bowed toward `bend`.
struct LegCurve {
  Vector3 a = Vector3::Zero();
  Vector3 b = Vector3::Zero();
  Vector3 bend = Vector3::UnitZ();  ///< unit, orthogonal to the chord
  double sagitta = 0.0;             ///< 0 for a straight leg

  bool curved() const { return sagitta > 0.0; }
  double chord() const { return (b - a).norm(); }
  Vector3 direction() const { return (b - a) / chord(); }

  Vector3 at(double u) const {
    if (!curved()) return a + u * (b - a);
    const double c = chord();
    const double h = sagitta;
    const double r = (c * c / 4.0 + h * h) / (2.0 * h);
    const double half = 2.0 * std::atan(2.0 * h / c);
    const Vector3 center = 0.5 * (a + b) - (r - h) * bend;
    const double th = -half + 2.0 * half * u;
    return center + r * (std::sin(th) * direction() + std::cos(th) * bend);
  }

  /// Signed progress of a point along the chord, in meters from a.
  double progress(const Vector3& p) const { return (p - a).dot(direction()); }
};

struct GeometricPath {
  std::vector<LegCurve> legs;
  std::vector<PathSegment> segments;

  double length() const {
    double l = 0.0;
    for (const auto& s : segments) l += s.length();
    return l;
  }
};

namespace detail {

inline PathSegment leg_piece(const LegCurve& leg, int leg_index, double u0, double u1, SegmentKind kind) {
  PathSegment s;
  s.kind = kind;
  s.leg = leg_index;
  s.u_start = u0;
  s.u_end = u1;
  s.start = leg.at(u0);
  s.end = leg.at(u1);
  if (leg.curved()) {
    s.geometry = SegmentGeometry::Arc;
    s.via = leg.at(0.5 * (u0 + u1));
  } else {
    s.geometry = SegmentGeometry::Line;
    s.via = 0.5 * (s.start + s.end);
  }
  return s;
}

inline Vector3 any_perpendicular(const Vector3& d) {
  const Vector3 trial = std::abs(d.z()) < 0.9 ? Vector3::UnitZ() : Vector3::UnitX();
  return (trial - trial.dot(d) * d).normalized();
}

/// Uniform double in [0, 1) from the top 53 bits; stable across standard libraries.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

/**
 * Leg progress of each retreat turning point. Default placement is k / (n + 0.5)
 * for k = 1..n (0.4 and 0.8 for two retreats); jitter shifts each by at most a
 * quarter of that spacing.
 */
inline std::vector<double> retreat_positions(const laban::RetreatParams& r, int leg) {
  std::vector<double> u;
  const int n = r.count_per_segment;
  if (n <= 0) return u;
  const double spacing = 1.0 / (n + 0.5);
  std::mt19937_64 rng(r.jitter_seed + static_cast<std::uint64_t>(leg));
  for (int k = 1; k <= n; ++k) {
    double pos = k * spacing;
    if (r.jitter_amount > 0.0) pos += r.jitter_amount * (detail::unit_uniform(rng) - 0.5) * 0.5 * spacing;
    u.push_back(pos);
  }
  return u;
}

/**
 * Builds the circuit for `spec` over `scene`.
 *
 * Throws InputError when the spec fails validation or the scene is degenerate.
 */
inline GeometricPath build_geometric_path(const WaypointScene& scene, const laban::ExpressionSpec& spec,
                                          const PathConfig& config = {}) {
  scene.validate();
  const auto report = laban::validate_spec(spec);
  if (!report.ok()) throw InputError("spec: " + report.errors.front().field + ": " + report.errors.front().message);

  const auto pts = scene.circuit();
  const Vector3 centroid = (pts[0] + pts[1] + pts[2]) / 3.0;
  const bool indirect = spec.effort.space == laban::Space::Indirect;
  const bool free = spec.effort.flow == laban::Flow::Free;
  const bool retreating = spec.shape.quality == laban::ShapeQuality::Retreating;

  GeometricPath path;
  for (int leg = 0; leg < 3; ++leg) {
    LegCurve curve;
    curve.a = pts[static_cast<std::size_t>(leg)];
    curve.b = pts[static_cast<std::size_t>(leg + 1)];
    const Vector3 dir = curve.direction();
    // Bow outward, away from the circuit centroid.
    Vector3 out = 0.5 * (curve.a + curve.b) - centroid;
    out -= out.dot(dir) * dir;
    if (out.norm() < 1e-9) {
      out = Vector3::UnitZ() - dir.z() * dir;
      if (out.norm() < 1e-9) out = detail::any_perpendicular(dir);
    }
    curve.bend = out.normalized();
    curve.sagitta = indirect ? config.sagitta_ratio * curve.chord() : 0.0;
    path.legs.push_back(curve);

    struct Event {
      double u;
      bool retreat;
    };
    std::vector<Event> events;
    if (free)
      for (int k = 1; k <= config.free_via_count; ++k)
        events.push_back({static_cast<double>(k) / (config.free_via_count + 1), false});
    if (retreating)
      for (double u : retreat_positions(spec.retreat, leg)) events.push_back({u, true});
    std::stable_sort(events.begin(), events.end(), [](const Event& x, const Event& y) { return x.u < y.u; });
    // A via-point landing on a retreat turn is absorbed by it; the reversal already stops the motion.
    std::vector<Event> merged;
    for (const auto& ev : events) {
      if (!merged.empty() && std::abs(ev.u - merged.back().u) <= 1e-9) {
        merged.back().retreat = merged.back().retreat || ev.retreat;
        continue;
      }
      merged.push_back(ev);
    }
    events = std::move(merged);

    double cur = 0.0;
    for (const auto& ev : events) {
      if (ev.u <= cur + 1e-12 || ev.u >= 1.0) continue;
      path.segments.push_back(detail::leg_piece(curve, leg, cur, ev.u, SegmentKind::Advance));
      if (!ev.retreat) {
        cur = ev.u;
        continue;
      }
      const double back = ev.u * (1.0 - spec.retreat.depth_fraction);
      PathSegment r;
      r.kind = SegmentKind::Retreat;
      r.leg = leg;
      r.u_start = ev.u;
      r.u_end = back;
      r.start = curve.at(ev.u);
      r.end = curve.at(back);
      if (spec.shape.mode == laban::ChangeMode::ArcLike) {
        // Bow against the advance: flip the leg's bend, re-orthogonalized to this sub-chord.
        const Vector3 sub = r.end - r.start;
        const Vector3 sub_dir = sub.normalized();
        Vector3 away = -(curve.bend - curve.bend.dot(sub_dir) * sub_dir);
        away = away.norm() < 1e-9 ? detail::any_perpendicular(sub_dir) : away.normalized();
        r.geometry = SegmentGeometry::Arc;
        r.via = 0.5 * (r.start + r.end) + config.sagitta_ratio * sub.norm() * away;
      } else {
        r.geometry = SegmentGeometry::Line;
        r.via = 0.5 * (r.start + r.end);
      }
      path.segments.push_back(r);
      cur = back;
    }
    path.segments.push_back(detail::leg_piece(curve, leg, cur, 1.0, SegmentKind::Advance));
  }
  return path;
}

/// Positional continuity and retreat ordering; returns a description of the
/// first violation, empty when the path is well formed.
inline std::string check_path(const GeometricPath& path) {
  for (std::size_t i = 0; i < path.segments.size(); ++i) {
    const auto& s = path.segments[i];
    if (i > 0 && (path.segments[i - 1].end - s.start).norm() > 1e-9)
      return "gap before segment " + std::to_string(i);
    if (s.kind == SegmentKind::Retreat) {
      if (i == 0 || path.segments[i - 1].kind != SegmentKind::Advance || path.segments[i - 1].leg != s.leg)
        return "retreat " + std::to_string(i) + " not preceded by an advance on its leg";
      const auto& leg = path.legs.at(static_cast<std::size_t>(s.leg));
      if (!(leg.progress(s.end) < leg.progress(s.start))) return "retreat " + std::to_string(i) + " moves forward";
    }
  }
  return {};
}

/**
 * Deletes Retreat segments and splices each re-advance onto the advance it
 * interrupted, trimming the part that retraces already-covered progress.
 * Via-point splits are kept.
 */
inline GeometricPath strip_retreats(const GeometricPath& path) {
  GeometricPath out;
  out.legs = path.legs;
  bool splice = false;
  double frontier = 0.0;
  int frontier_leg = -1;
  for (const auto& s : path.segments) {
    if (s.leg != frontier_leg) {
      frontier_leg = s.leg;
      frontier = 0.0;
      splice = false;
    }
    if (s.kind == SegmentKind::Retreat) {
      splice = true;
      continue;
    }
    const auto& leg = path.legs.at(static_cast<std::size_t>(s.leg));
    const double u0 = std::max(s.u_start, frontier);
    if (s.u_end <= u0) continue;
    if (splice && !out.segments.empty() && out.segments.back().leg == s.leg) {
      const double first = out.segments.back().u_start;
      out.segments.back() = detail::leg_piece(leg, s.leg, first, s.u_end, SegmentKind::Advance);
    } else {
      out.segments.push_back(detail::leg_piece(leg, s.leg, u0, s.u_end, SegmentKind::Advance));
    }
    frontier = s.u_end;
    splice = false;
  }
  return out;
}

}  // namespace expressive::synthesis
