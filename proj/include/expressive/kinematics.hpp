#pragma once

// Serial revolute chain: forward kinematics, geometric Jacobian and
// damped-least-squares inverse kinematics with a nullspace posture task.
//
// Each joint frame is obtained from its parent by a fixed transform
// (translation + rotation) followed by a rotation of q_i about the joint axis:
//
//   T_i = T_{i-1} * [R_parent_i | t_parent_i] * Rot(axis_i, q_i)
//   T_ee = T_n * ee_offset
//
// Lengths are meters, angles radians.

#include "expressive/error.hpp"

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace expressive::kinematics {

using Vector3 = Eigen::Vector3d;
using Quaternion = Eigen::Quaterniond;
using Jacobian = Eigen::Matrix<double, 6, Eigen::Dynamic>;

struct RigidTransform {
  Vector3 translation = Vector3::Zero();
  Quaternion rotation = Quaternion::Identity();

  Eigen::Isometry3d isometry() const {
    Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
    t.linear() = rotation.toRotationMatrix();
    t.translation() = translation;
    return t;
  }
};

struct RevoluteJoint {
  std::string name;
  RigidTransform parent;
  Vector3 axis = Vector3::UnitZ();
  double limit_lo = -std::numbers::pi;
  double limit_hi = std::numbers::pi;
};

struct JointConfig {
  Eigen::VectorXd angles;

  JointConfig() = default;
  explicit JointConfig(Eigen::VectorXd a) : angles(std::move(a)) {}
  JointConfig(std::initializer_list<double> a) : angles(static_cast<Eigen::Index>(a.size())) {
    Eigen::Index i = 0;
    for (double v : a) angles[i++] = v;
  }

  std::size_t size() const { return static_cast<std::size_t>(angles.size()); }
  double operator[](std::size_t i) const { return angles[static_cast<Eigen::Index>(i)]; }
  double& operator[](std::size_t i) { return angles[static_cast<Eigen::Index>(i)]; }
  bool operator==(const JointConfig& o) const {
    return angles.size() == o.angles.size() && angles == o.angles;
  }
};

struct Pose {
  Vector3 position = Vector3::Zero();
  Quaternion orientation = Quaternion::Identity();
};

class KinematicChain {
public:
  KinematicChain() = default;

  /// Validates the invariants (unit axes, ordered limits, wrist count range).
  KinematicChain(std::string id, std::vector<RevoluteJoint> joints, RigidTransform ee_offset,
                 std::size_t wrist_joint_count, JointConfig home)
      : id_(std::move(id)),
        joints_(std::move(joints)),
        ee_offset_(std::move(ee_offset)),
        wrist_joint_count_(wrist_joint_count),
        home_(std::move(home)) {
    if (joints_.empty()) throw InputError("chain has no joints");
    for (const auto& j : joints_) {
      if (std::abs(j.axis.norm() - 1.0) > 1e-9)
        throw InputError("joint '" + j.name + "': rotation axis must have unit norm");
      if (!(j.limit_lo < j.limit_hi))
        throw InputError("joint '" + j.name + "': limit_lo must be below limit_hi");
      if (std::abs(j.parent.rotation.norm() - 1.0) > 1e-9)
        throw InputError("joint '" + j.name + "': parent rotation must be a unit quaternion");
    }
    if (std::abs(ee_offset_.rotation.norm() - 1.0) > 1e-9)
      throw InputError("ee_offset rotation must be a unit quaternion");
    if (wrist_joint_count_ < 1 || wrist_joint_count_ >= joints_.size())
      throw InputError("wrist_joint_count must be in [1, joint count)");
    if (home_.size() != joints_.size()) throw InputError("home config length does not match joint count");
    if (!within_limits(home_)) throw InputError("home config violates joint limits");
  }

  const std::string& id() const { return id_; }
  std::size_t size() const { return joints_.size(); }
  const std::vector<RevoluteJoint>& joints() const { return joints_; }
  const RevoluteJoint& joint(std::size_t i) const { return joints_.at(i); }
  const RigidTransform& ee_offset() const { return ee_offset_; }
  std::size_t wrist_joint_count() const { return wrist_joint_count_; }
  const JointConfig& home() const { return home_; }

  /// Indices of the trailing "end effector" joints.
  std::vector<std::size_t> wrist_joints() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = joints_.size() - wrist_joint_count_; i < joints_.size(); ++i) idx.push_back(i);
    return idx;
  }

  std::vector<std::string> joint_names() const {
    std::vector<std::string> names;
    names.reserve(joints_.size());
    for (const auto& j : joints_) names.push_back(j.name);
    return names;
  }

  bool within_limits(const JointConfig& q) const {
    if (q.size() != joints_.size()) return false;
    for (std::size_t i = 0; i < joints_.size(); ++i)
      if (q[i] < joints_[i].limit_lo || q[i] > joints_[i].limit_hi) return false;
    return true;
  }

  JointConfig clamp(JointConfig q) const {
    for (std::size_t i = 0; i < joints_.size(); ++i)
      q[i] = std::clamp(q[i], joints_[i].limit_lo, joints_[i].limit_hi);
    return q;
  }

  void check_dimension(const JointConfig& q) const {
    if (q.size() != joints_.size())
      throw InputError("joint config has " + std::to_string(q.size()) + " angles, chain '" + id_ +
                       "' has " + std::to_string(joints_.size()) + " joints");
  }

private:
  std::string id_;
  std::vector<RevoluteJoint> joints_;
  RigidTransform ee_offset_;
  std::size_t wrist_joint_count_ = 1;
  JointConfig home_;
};

namespace detail {

/// World-frame joint origins and axes plus the end-effector transform.
struct ChainFrames {
  std::vector<Vector3> origins;
  std::vector<Vector3> axes;
  Eigen::Isometry3d ee = Eigen::Isometry3d::Identity();
};

inline ChainFrames compute_frames(const KinematicChain& chain, const JointConfig& q) {
  chain.check_dimension(q);
  ChainFrames f;
  f.origins.reserve(chain.size());
  f.axes.reserve(chain.size());
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto& j = chain.joint(i);
    t = t * j.parent.isometry();
    f.origins.push_back(t.translation());
    f.axes.push_back(t.linear() * j.axis);
    t = t * Eigen::AngleAxisd(q[i], j.axis);
  }
  f.ee = t * chain.ee_offset().isometry();
  return f;
}

}  // namespace detail

inline Pose forward_kinematics(const KinematicChain& chain, const JointConfig& q) {
  const auto f = detail::compute_frames(chain, q);
  Pose p;
  p.position = f.ee.translation();
  p.orientation = Quaternion(f.ee.linear()).normalized();
  return p;
}

/// Geometric Jacobian in the world frame: rows 0-2 linear velocity, rows 3-5
/// angular velocity of the end effector per unit joint rate.
inline Jacobian jacobian(const KinematicChain& chain, const JointConfig& q) {
  const auto f = detail::compute_frames(chain, q);
  const Vector3 p_ee = f.ee.translation();
  Jacobian jac(6, static_cast<Eigen::Index>(chain.size()));
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    jac.block<3, 1>(0, c) = f.axes[i].cross(p_ee - f.origins[i]);
    jac.block<3, 1>(3, c) = f.axes[i];
  }
  return jac;
}

/// Rotation vector of q_target * q_current^-1, taking the short way round.
inline Vector3 orientation_error(const Quaternion& target, const Quaternion& current) {
  Quaternion d = target * current.conjugate();
  if (d.w() < 0.0) d.coeffs() = -d.coeffs();
  const Eigen::AngleAxisd aa(d.normalized());
  return aa.axis() * aa.angle();
}

enum class IkTask {
  FullPose,      ///< position and orientation (6 rows)
  PositionOnly,  ///< position only (3 rows); orientation left to the nullspace
};

struct IkOptions {
  double damping = 0.05;
  int max_iterations = 200;
  double max_step = 0.2;  ///< rad, largest per-joint change in one iteration
  double position_tolerance = 1e-4;
  double orientation_tolerance = 1e-3;
  double posture_gain = 0.1;
  IkTask task = IkTask::FullPose;
};

struct IkResult {
  bool converged = false;
  JointConfig config;  ///< solution, or best-effort config on failure
  double position_error = 0.0;
  double orientation_error = 0.0;
  int iterations = 0;
};

/**
 * Damped least squares on the pose error with the posture error projected
 * into the task nullspace:
 *
 *   dq = J^T (J J^T + lambda^2 I)^-1 e + (I - J^+ J) k (q_posture - q)
 *
 * Locked joints have their Jacobian columns and posture entries zeroed and are
 * copied from the seed, so they come back bit-identical. Joints resting on a
 * limit are left out of the posture term while it pushes them outward. The step is scaled to
 * at most max_step per joint, then the config is clamped to the joint limits.
 *
 * Throws InputError on dimension mismatch or locked index out of range.
 * Non-convergence is reported through IkResult::converged with the config of
 * smallest residual seen.
 */
inline IkResult solve_ik(const KinematicChain& chain, const Pose& target, const JointConfig& seed,
                         const std::optional<JointConfig>& posture_target,
                         std::span<const std::size_t> locked_joints, const IkOptions& options = {}) {
  chain.check_dimension(seed);
  if (posture_target) chain.check_dimension(*posture_target);
  const auto n = static_cast<Eigen::Index>(chain.size());
  std::vector<bool> locked(chain.size(), false);
  for (std::size_t idx : locked_joints) {
    if (idx >= chain.size()) throw InputError("locked joint index " + std::to_string(idx) + " out of range");
    locked[idx] = true;
  }

  const bool full = options.task == IkTask::FullPose;
  const Eigen::Index rows = full ? 6 : 3;

  JointConfig q = seed;
  IkResult best;
  best.config = q;
  double best_score = std::numeric_limits<double>::infinity();

  for (int it = 0;; ++it) {
    const auto frames = detail::compute_frames(chain, q);
    const Vector3 pos_err = target.position - frames.ee.translation();
    const Vector3 rot_err =
        full ? orientation_error(target.orientation, Quaternion(frames.ee.linear()).normalized()) : Vector3::Zero();
    const double pe = pos_err.norm();
    const double oe = rot_err.norm();
    const double score = pe + oe;
    if (score < best_score) {
      best_score = score;
      best.config = q;
      best.position_error = pe;
      best.orientation_error = oe;
      best.iterations = it;
    }
    if (pe <= options.position_tolerance && (!full || oe <= options.orientation_tolerance)) {
      best.converged = true;
      best.config = q;
      best.position_error = pe;
      best.orientation_error = oe;
      best.iterations = it;
      return best;
    }
    if (it >= options.max_iterations) break;

    Eigen::MatrixXd jac(rows, n);
    Eigen::VectorXd err(rows);
    const Vector3 p_ee = frames.ee.translation();
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto i = static_cast<std::size_t>(c);
      if (locked[i]) {
        jac.col(c).setZero();
        continue;
      }
      jac.block(0, c, 3, 1) = frames.axes[i].cross(p_ee - frames.origins[i]);
      if (full) jac.block(3, c, 3, 1) = frames.axes[i];
    }
    err.head<3>() = pos_err;
    if (full) err.tail<3>() = rot_err;

    const Eigen::MatrixXd damped =
        jac * jac.transpose() + options.damping * options.damping * Eigen::MatrixXd::Identity(rows, rows);
    Eigen::VectorXd dq = jac.transpose() * damped.ldlt().solve(err);

    // The posture pull is dropped for the second half of the budget so that a
    // posture fighting the joint limits cannot keep the task from converging.
    if (posture_target && it < options.max_iterations / 2) {
      Eigen::VectorXd grad = options.posture_gain * (posture_target->angles - q.angles);
      Eigen::MatrixXd jac_free = jac;
      for (Eigen::Index c = 0; c < n; ++c) {
        const auto i = static_cast<std::size_t>(c);
        const auto& jt = chain.joint(i);
        const bool pinned = (q[i] <= jt.limit_lo && grad[c] < 0.0) || (q[i] >= jt.limit_hi && grad[c] > 0.0);
        if (locked[i] || pinned) {
          grad[c] = 0.0;
          jac_free.col(c).setZero();
        }
      }
      const Eigen::MatrixXd pinv = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(jac_free).pseudoInverse();
      const Eigen::MatrixXd null_proj = Eigen::MatrixXd::Identity(n, n) - pinv * jac_free;
      dq += null_proj * grad;
    }

    const double largest = dq.cwiseAbs().maxCoeff();
    if (largest > options.max_step) dq *= options.max_step / largest;

    q.angles += dq;
    q = chain.clamp(std::move(q));
    for (std::size_t i = 0; i < chain.size(); ++i)
      if (locked[i]) q[i] = seed[i];
  }
  return best;
}

inline IkResult solve_ik(const KinematicChain& chain, const Pose& target, const JointConfig& seed,
                         const std::optional<JointConfig>& posture_target = std::nullopt,
                         std::initializer_list<std::size_t> locked_joints = {}, const IkOptions& options = {}) {
  return solve_ik(chain, target, seed, posture_target,
                  std::span<const std::size_t>(locked_joints.begin(), locked_joints.size()), options);
}

/**
 * Representative 7-revolute arm with Panda-like link lengths and limits.
 * Parent transforms follow the modified DH pattern Rot_x(alpha) Trans_x(a) Trans_z(d);
 * the flange plus hand sit 0.2104 m along the last axis, rotated -45 deg.
 * Not a calibrated model of any physical robot.
 */
inline KinematicChain default_chain() {
  struct Row {
    double a, d, alpha, lo, hi;
  };
  constexpr double half_pi = std::numbers::pi / 2.0;
  constexpr Row rows[] = {
      {0.0, 0.333, 0.0, -2.8973, 2.8973},       {0.0, 0.0, -half_pi, -1.7628, 1.7628},
      {0.0, 0.316, half_pi, -2.8973, 2.8973},   {0.0825, 0.0, half_pi, -3.0718, -0.0698},
      {-0.0825, 0.384, -half_pi, -2.8973, 2.8973}, {0.0, 0.0, half_pi, -0.0175, 3.7525},
      {0.088, 0.0, half_pi, -2.8973, 2.8973},
  };
  std::vector<RevoluteJoint> joints;
  int k = 1;
  for (const auto& r : rows) {
    RevoluteJoint j;
    j.name = "joint" + std::to_string(k++);
    j.parent.rotation = Quaternion(Eigen::AngleAxisd(r.alpha, Vector3::UnitX()));
    j.parent.translation = Vector3(r.a, -std::sin(r.alpha) * r.d, std::cos(r.alpha) * r.d);
    j.axis = Vector3::UnitZ();
    j.limit_lo = r.lo;
    j.limit_hi = r.hi;
    joints.push_back(std::move(j));
  }
  RigidTransform ee;
  ee.translation = Vector3(0.0, 0.0, 0.107 + 0.1034);
  ee.rotation = Quaternion(Eigen::AngleAxisd(-std::numbers::pi / 4.0, Vector3::UnitZ()));
  const double pi = std::numbers::pi;
  JointConfig home{0.0, -pi / 4.0, 0.0, -3.0 * pi / 4.0, 0.0, pi / 2.0, pi / 4.0};
  return KinematicChain("panda-like-7r", std::move(joints), ee, 2, std::move(home));
}

}  // namespace expressive::kinematics
