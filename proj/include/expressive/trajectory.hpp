#pragma once

// Joint-space resolution of a timed Cartesian path, and the full
// spec + scene -> trajectory pipeline.

#include "expressive/error.hpp"
#include "expressive/kinematics.hpp"
#include "expressive/laban.hpp"
#include "expressive/laban_io.hpp"
#include "expressive/path.hpp"
#include "expressive/scene.hpp"
#include "expressive/timing.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace expressive::synthesis {

using kinematics::JointConfig;
using kinematics::KinematicChain;
using kinematics::Pose;

struct TrajectoryMeta {
  std::string expression;
  std::string chain_id;
  double duration_s = 0.0;
  double dt = 0.0;
  std::string spec_hash;
};

struct JointSample {
  double t = 0.0;
  JointConfig q;
};

struct EePoint {
  double t = 0.0;
  Pose pose;
};

struct TimedJointTrajectory {
  double dt = 0.0;
  std::vector<std::string> joint_names;
  std::vector<JointSample> samples;
  std::vector<EePoint> ee_path;
  TrajectoryMeta meta;
  /// Per-sample motion phase. Known for freshly synthesized trajectories only;
  /// not part of the file format.
  std::vector<Phase> phases;
};

struct SynthesisConfig {
  double dt = 0.02;
  PathConfig path;
  double max_joint_step = 0.2;  ///< rad between consecutive samples
  bool use_posture = true;
  std::optional<std::chrono::steady_clock::time_point> deadline;
  kinematics::IkOptions tracking = [] {
    kinematics::IkOptions o;
    o.task = kinematics::IkTask::PositionOnly;
    o.position_tolerance = 1e-6;
    return o;
  }();
};

/**
 * Tracks every sample of `timed` with position-only IK, seeded from the
 * previous solution (the first from the posture reference) and pulled toward
 * the posture in the task nullspace. Strong weight locks the trailing wrist
 * joints at their starting values.
 *
 * Throws ProcessingError("resolve") on IK failure, a joint jump above
 * max_joint_step, or an expired deadline.
 */
inline TimedJointTrajectory resolve_joint_trajectory(const KinematicChain& chain, const TimedPath& timed,
                                                     const laban::ExpressionSpec& spec,
                                                     const laban::PostureTarget& posture,
                                                     const SynthesisConfig& config = {}) {
  chain.check_dimension(posture.q_ref);
  if (!chain.within_limits(posture.q_ref)) throw InputError("posture reference violates joint limits");
  if (timed.points.empty()) throw ProcessingError("resolve", "timed path has no samples");

  std::vector<std::size_t> locked;
  if (spec.effort.weight == laban::Weight::Strong) locked = chain.wrist_joints();
  const std::optional<JointConfig> posture_target =
      config.use_posture ? std::optional<JointConfig>(posture.q_ref) : std::nullopt;

  TimedJointTrajectory traj;
  traj.dt = timed.dt;
  traj.joint_names = chain.joint_names();
  traj.meta.expression = spec.name;
  traj.meta.chain_id = chain.id();
  traj.meta.duration_s = timed.duration;
  traj.meta.dt = timed.dt;
  traj.meta.spec_hash = laban::spec_hash(spec);
  traj.samples.reserve(timed.points.size());
  traj.ee_path.reserve(timed.points.size());
  traj.phases.reserve(timed.points.size());

  JointConfig q = posture.q_ref;
  for (std::size_t i = 0; i < timed.points.size(); ++i) {
    if (config.deadline && std::chrono::steady_clock::now() > *config.deadline)
      throw TimeoutError("resolve", "deadline exceeded at sample " + std::to_string(i));
    const auto& tp = timed.points[i];
    Pose target;
    target.position = tp.position;
    const auto r = kinematics::solve_ik(chain, target, q, posture_target, locked, config.tracking);
    if (!r.converged)
      throw ProcessingError("resolve", "IK failed at sample " + std::to_string(i) + " (t = " + std::to_string(tp.t) +
                                           " s), residual " + std::to_string(r.position_error) + " m");
    if (i > 0) {
      const double jump = (r.config.angles - q.angles).cwiseAbs().maxCoeff();
      if (jump > config.max_joint_step)
        throw ProcessingError("resolve", "joint step " + std::to_string(jump) + " rad at sample " +
                                             std::to_string(i) + " exceeds " + std::to_string(config.max_joint_step));
    }
    q = r.config;
    traj.samples.push_back({tp.t, q});
    traj.ee_path.push_back({tp.t, kinematics::forward_kinematics(chain, q)});
    traj.phases.push_back(tp.phase);
  }
  return traj;
}

/// Mean joint-space distance to the posture reference over all samples.
inline double mean_posture_error(const TimedJointTrajectory& traj, const laban::PostureTarget& posture) {
  if (traj.samples.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : traj.samples) sum += (s.q.angles - posture.q_ref.angles).norm();
  return sum / static_cast<double>(traj.samples.size());
}

/// Checks arc apexes and retreat turning points with position-only IK.
inline void verify_path_reachable(const KinematicChain& chain, const GeometricPath& path) {
  kinematics::IkOptions opt;
  opt.task = kinematics::IkTask::PositionOnly;
  for (std::size_t i = 0; i < path.segments.size(); ++i) {
    const auto& s = path.segments[i];
    if (s.geometry != SegmentGeometry::Arc) continue;
    Pose target;
    target.position = s.at(0.5);
    const auto r = kinematics::solve_ik(chain, target, chain.home(), std::nullopt, {}, opt);
    if (!r.converged)
      throw ProcessingError("path", "arc point of segment " + std::to_string(i) + " unreachable (residual " +
                                        std::to_string(r.position_error) + " m)");
  }
}

/**
 * build_geometric_path -> time_parameterize -> resolve_joint_trajectory.
 * Invalid specs raise InputError; stage failures raise ProcessingError tagged
 * with the stage.
 */
inline TimedJointTrajectory synthesize(const KinematicChain& chain, const laban::ExpressionSpec& spec,
                                       const WaypointScene& scene, const SynthesisConfig& config = {}) {
  const auto report = laban::validate_spec(spec);
  if (!report.ok()) throw InputError(report.errors.front().field + ": " + report.errors.front().message);
  GeometricPath path;
  try {
    path = build_geometric_path(scene, spec, config.path);
  } catch (const InputError& e) {
    throw ProcessingError("path", e.what());
  }
  verify_path_reachable(chain, path);
  const TimedPath timed = time_parameterize(path, spec, config.dt);
  return resolve_joint_trajectory(chain, timed, spec, laban::posture_for(spec.shape.form), config);
}

/// First violated trajectory invariant, or empty.
inline std::string check_trajectory(const TimedJointTrajectory& traj, const KinematicChain& chain) {
  if (traj.samples.empty()) return "no samples";
  if (traj.ee_path.size() != traj.samples.size()) return "ee_path and samples differ in length";
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const auto& s = traj.samples[i];
    if (i > 0) {
      const double step = s.t - traj.samples[i - 1].t;
      if (!(step > 0.0)) return "timestamps not increasing at sample " + std::to_string(i);
      if (std::abs(step - traj.dt) > 1e-9) return "non-uniform spacing at sample " + std::to_string(i);
    }
    if (!chain.within_limits(s.q)) return "joint limits violated at sample " + std::to_string(i);
    const auto fk = kinematics::forward_kinematics(chain, s.q);
    if ((fk.position - traj.ee_path[i].pose.position).norm() > 1e-6)
      return "ee_path disagrees with FK at sample " + std::to_string(i);
  }
  return {};
}

}  // namespace expressive::synthesis
