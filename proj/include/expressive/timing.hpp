#pragma once

// Timing law for a geometric path: each segment follows a minimum-jerk
// progress profile, segment durations are proportional to arc length, and
// every Advance/Retreat reversal holds still for the spec's pause.

#include "expressive/error.hpp"
#include "expressive/laban.hpp"
#include "expressive/path.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <vector>

namespace expressive::synthesis {

/// s(tau) = 10 tau^3 - 15 tau^4 + 6 tau^5; zero velocity and acceleration at both ends.
inline double min_jerk(double tau) {
  tau = std::clamp(tau, 0.0, 1.0);
  const double t3 = tau * tau * tau;
  return t3 * (10.0 + tau * (-15.0 + 6.0 * tau));
}

/// ds/dtau.
inline double min_jerk_rate(double tau) {
  tau = std::clamp(tau, 0.0, 1.0);
  const double u = tau * (1.0 - tau);
  return 30.0 * u * u;
}

enum class Phase { Advance, Retreat, Dwell };

inline std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Advance: return "Advance";
    case Phase::Retreat: return "Retreat";
    case Phase::Dwell: return "Dwell";
  }
  return "?";
}

struct TimelineEntry {
  bool dwell = false;
  std::size_t segment = 0;  ///< segment moved along, or the one the dwell follows
  double t0 = 0.0;
  double duration = 0.0;
};

struct TimedPoint {
  double t = 0.0;
  Vector3 position = Vector3::Zero();
  Phase phase = Phase::Advance;
  int leg = 0;
};

struct TimedPath {
  GeometricPath path;
  std::vector<TimelineEntry> timeline;
  double duration = 0.0;
  double dt = 0.02;
  std::vector<TimedPoint> points;  ///< samples at t = i * dt

  /// Position at any time; clamps to the endpoints outside [0, duration].
  TimedPoint evaluate(double t) const {
    TimedPoint p;
    p.t = t;
    if (timeline.empty()) return p;
    auto it = std::upper_bound(timeline.begin(), timeline.end(), t,
                               [](double v, const TimelineEntry& e) { return v < e.t0; });
    const TimelineEntry& e = it == timeline.begin() ? timeline.front() : *std::prev(it);
    const auto& seg = path.segments[e.segment];
    p.leg = seg.leg;
    if (e.dwell) {
      p.position = seg.end;
      p.phase = Phase::Dwell;
      return p;
    }
    const double tau = (t - e.t0) / e.duration;
    p.position = seg.at(min_jerk(tau));
    p.phase = seg.kind == SegmentKind::Retreat ? Phase::Retreat : Phase::Advance;
    return p;
  }
};

/**
 * Lays the path out over spec.duration_s and samples it every `dt` seconds
 * from t = 0 until the first sample at or past the end.
 *
 * Throws ProcessingError("timing") if dwells consume the whole duration or
 * the shortest segment lasts less than dt.
 */
inline TimedPath time_parameterize(const GeometricPath& path, const laban::ExpressionSpec& spec, double dt = 0.02) {
  if (!(dt > 0.0)) throw InputError("dt must be positive");
  if (path.segments.empty()) throw ProcessingError("timing", "empty path");
  if (auto bad = check_path(path); !bad.empty()) throw ProcessingError("timing", "path not continuous: " + bad);

  TimedPath out;
  out.path = path;
  out.dt = dt;
  out.duration = spec.duration_s;

  std::size_t pauses = 0;
  for (std::size_t i = 1; i < path.segments.size(); ++i)
    if (path.segments[i].kind != path.segments[i - 1].kind) ++pauses;
  const double pause = spec.retreat.pause_s;
  const double motion_time = spec.duration_s - static_cast<double>(pauses) * pause;
  if (!(motion_time > 0.0)) throw ProcessingError("timing", "reversal dwells consume the whole duration");

  const double total_length = path.length();
  double t = 0.0;
  double shortest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < path.segments.size(); ++i) {
    if (i > 0 && pause > 0.0 && path.segments[i].kind != path.segments[i - 1].kind) {
      out.timeline.push_back({true, i - 1, t, pause});
      t += pause;
    }
    const double d = motion_time * path.segments[i].length() / total_length;
    shortest = std::min(shortest, d);
    out.timeline.push_back({false, i, t, d});
    t += d;
  }
  if (shortest < dt)
    throw ProcessingError("timing", "dt " + std::to_string(dt) + " s exceeds shortest segment duration " +
                                        std::to_string(shortest) + " s");

  const auto n = static_cast<std::size_t>(std::ceil(spec.duration_s / dt - 1e-9));
  out.points.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out.points.push_back(out.evaluate(static_cast<double>(i) * dt));
  return out;
}

}  // namespace expressive::synthesis
