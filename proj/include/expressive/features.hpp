#pragma once

// Measured trajectory descriptors and the threshold classifier that maps them
// back to Effort settings.

#include "expressive/error.hpp"
#include "expressive/laban.hpp"
#include "expressive/scene.hpp"
#include "expressive/trajectory.hpp"

#include <algorithm>
#include <limits>
#include <array>
#include <cmath>
#include <vector>

namespace expressive::synthesis {

struct LegFeatures {
  std::size_t first_sample = 0;
  std::size_t last_sample = 0;
  double straightness = 0.0;  ///< max distance from the chord / chord length
  int reversal_count = 0;
  int via_count = 0;
};

struct MotionFeatures {
  double duration_s = 0.0;
  double path_length_m = 0.0;
  double straightness = 0.0;  ///< max over legs
  int reversal_count = 0;     ///< sum over legs
  int via_count = 0;          ///< min over legs
  double wrist_displacement_rad = 0.0;
  double mean_speed_mps = 0.0;  ///< path length over the time spent moving (dwells excluded)
  std::array<LegFeatures, 3> legs{};
};

struct FeatureConfig {
  double hysteresis_m = 1e-3;
  double arrival_radius_m = 5e-3;
  double stop_ratio = 0.5;  ///< a speed dip counts as a stop below this share of its flanking peaks
};

namespace detail {

/// Progress-velocity sign changes, ignoring wiggles smaller than `band`.
inline int count_reversals(const std::vector<double>& progress, double band) {
  if (progress.size() < 2) return 0;
  int count = 0;
  int dir = +1;
  double extreme = progress.front();
  for (double p : progress) {
    if (dir > 0) {
      if (p > extreme) extreme = p;
      else if (extreme - p > band) {
        ++count;
        dir = -1;
        extreme = p;
      }
    } else {
      if (p < extreme) extreme = p;
      else if (p - extreme > band) {
        ++count;
        dir = +1;
        extreme = p;
      }
    }
  }
  return count;
}

struct Stop {
  std::size_t begin = 0;  ///< first interval of the dip (inclusive)
  std::size_t end = 0;    ///< last interval of the dip (inclusive)
  std::size_t left_peak = 0;
  std::size_t right_peak = 0;
};

/// Pronounced dips of the per-interval speed, measured against the nearest
/// local maximum on each side. Plateaus (dwells) count once.
inline std::vector<Stop> find_stops(const std::vector<double>& speed, double ratio) {
  std::vector<Stop> stops;
  const std::size_t m = speed.size();
  std::size_t i = 1;
  while (i + 1 < m) {
    if (!(speed[i] < speed[i - 1])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < m && speed[j + 1] <= speed[j] + 1e-12 && speed[j + 1] >= speed[j] - 1e-12) ++j;
    if (j + 1 < m && speed[j + 1] < speed[j]) {  // still descending
      i = j + 1;
      continue;
    }
    if (j + 1 >= m) break;
    const double v = speed[i];
    std::size_t lp = i - 1;
    while (lp > 0 && speed[lp - 1] >= speed[lp]) --lp;
    std::size_t rp = j + 1;
    while (rp + 1 < m && speed[rp + 1] >= speed[rp]) ++rp;
    if (v < ratio * std::min(speed[lp], speed[rp])) stops.push_back({i, j, lp, rp});
    i = j + 1;
  }
  return stops;
}

}  // namespace detail

/**
 * Splits the end-effector path into the three legs at the samples closest to
 * waypoints B and C, then measures each leg against its chord.
 *
 * Reversals are sign changes of the chord-projected progress with a hysteresis
 * band. Via-points are interior speed dips across which progress keeps its
 * direction; dips where it flips are reversals and are not counted again.
 *
 * Throws InputError for trajectories with fewer than two samples.
 */
inline MotionFeatures measure_features(const TimedJointTrajectory& traj, const WaypointScene& scene,
                                       std::size_t wrist_joint_count, const FeatureConfig& cfg = {}) {
  const std::size_t n = traj.ee_path.size();
  if (n < 2 || traj.samples.size() != n) throw InputError("trajectory is empty");

  MotionFeatures f;
  f.duration_s = traj.ee_path.back().t - traj.ee_path.front().t;
  std::vector<Vector3> pos(n);
  for (std::size_t i = 0; i < n; ++i) pos[i] = traj.ee_path[i].pose.position;
  double moving_s = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double step = (pos[i] - pos[i - 1]).norm();
    f.path_length_m += step;
    if (step > 0.0) moving_s += traj.ee_path[i].t - traj.ee_path[i - 1].t;
  }
  f.mean_speed_mps = moving_s > 0.0 ? f.path_length_m / moving_s : 0.0;

  const std::size_t dof = traj.samples.front().q.size();
  const std::size_t wrist = std::min(wrist_joint_count, dof);
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = dof - wrist; j < dof; ++j)
      f.wrist_displacement_rad += std::abs(traj.samples[i].q[j] - traj.samples[i - 1].q[j]);

  // Leg boundaries: first approach within the arrival radius, then down to the local minimum.
  const auto pts = scene.circuit();
  std::array<std::size_t, 4> bounds{0, 0, 0, n - 1};
  std::size_t from = 0;
  for (std::size_t k = 1; k <= 2; ++k) {
    const Vector3& w = pts[k];
    std::size_t idx = n;
    for (std::size_t i = from; i < n; ++i)
      if ((pos[i] - w).norm() <= cfg.arrival_radius_m) {
        idx = i;
        break;
      }
    if (idx == n) {
      idx = from;
      for (std::size_t i = from; i < n; ++i)
        if ((pos[i] - w).norm() < (pos[idx] - w).norm()) idx = i;
    } else {
      while (idx + 1 < n && (pos[idx + 1] - w).norm() < (pos[idx] - w).norm()) ++idx;
    }
    bounds[k] = idx;
    from = idx;
  }

  f.via_count = std::numeric_limits<int>::max();
  for (std::size_t leg = 0; leg < 3; ++leg) {
    auto& lf = f.legs[leg];
    lf.first_sample = bounds[leg];
    lf.last_sample = bounds[leg + 1];
    const Vector3 a = pts[leg];
    const Vector3 b = pts[leg + 1];
    const double chord = (b - a).norm();
    const Vector3 dir = (b - a) / chord;

    std::vector<double> progress;
    double max_dev = 0.0;
    for (std::size_t i = lf.first_sample; i <= lf.last_sample; ++i) {
      const Vector3 rel = pos[i] - a;
      const double s = rel.dot(dir);
      progress.push_back(s);
      max_dev = std::max(max_dev, (rel - s * dir).norm());
    }
    lf.straightness = max_dev / chord;
    lf.reversal_count = detail::count_reversals(progress, cfg.hysteresis_m);

    std::vector<double> speed;
    for (std::size_t i = lf.first_sample; i < lf.last_sample; ++i)
      speed.push_back((pos[i + 1] - pos[i]).norm() / traj.dt);
    for (const auto& st : detail::find_stops(speed, cfg.stop_ratio)) {
      // progress[k] is the sample at the start of interval k
      const double before = progress[st.begin] - progress[st.left_peak];
      const double after = progress[st.right_peak + 1] - progress[st.end + 1];
      if (before * after > 0.0) ++lf.via_count;
    }

    f.straightness = std::max(f.straightness, lf.straightness);
    f.reversal_count += lf.reversal_count;
    f.via_count = std::min(f.via_count, lf.via_count);
  }
  return f;
}

struct EffortEstimate {
  laban::EffortSettings effort;
  laban::ShapeQuality quality = laban::ShapeQuality::None;
};

struct ClassifierThresholds {
  double sustained_min_s = 8.0;
  double indirect_min_straightness = 0.03;
  int free_min_vias = 1;
  double strong_max_wrist_rad = 1e-6;
  int retreating_min_reversals = 1;
};

inline EffortEstimate classify_effort(const MotionFeatures& f, const ClassifierThresholds& th = {}) {
  EffortEstimate e;
  e.effort.time = f.duration_s >= th.sustained_min_s ? laban::Time::Sustained : laban::Time::Sudden;
  e.effort.space = f.straightness >= th.indirect_min_straightness ? laban::Space::Indirect : laban::Space::Direct;
  e.effort.flow = f.via_count >= th.free_min_vias ? laban::Flow::Free : laban::Flow::Bound;
  e.effort.weight = f.wrist_displacement_rad <= th.strong_max_wrist_rad ? laban::Weight::Strong : laban::Weight::Light;
  e.quality = f.reversal_count >= th.retreating_min_reversals ? laban::ShapeQuality::Retreating
                                                              : laban::ShapeQuality::None;
  return e;
}

inline nlohmann::ordered_json features_to_json(const MotionFeatures& f) {
  nlohmann::ordered_json j;
  j["duration_s"] = f.duration_s;
  j["path_length_m"] = f.path_length_m;
  j["straightness"] = f.straightness;
  j["reversal_count"] = f.reversal_count;
  j["via_count"] = f.via_count;
  j["wrist_displacement_rad"] = f.wrist_displacement_rad;
  j["mean_speed_mps"] = f.mean_speed_mps;
  j["legs"] = nlohmann::ordered_json::array();
  for (const auto& l : f.legs)
    j["legs"].push_back({{"first_sample", l.first_sample},
                         {"last_sample", l.last_sample},
                         {"straightness", l.straightness},
                         {"reversal_count", l.reversal_count},
                         {"via_count", l.via_count}});
  return j;
}

inline nlohmann::ordered_json estimate_to_json(const EffortEstimate& e) {
  return {{"time", laban::to_string(e.effort.time)},
          {"space", laban::to_string(e.effort.space)},
          {"flow", laban::to_string(e.effort.flow)},
          {"weight", laban::to_string(e.effort.weight)},
          {"quality", laban::to_string(e.quality)}};
}

}  // namespace expressive::synthesis
