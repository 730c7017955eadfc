#pragma once

// Trajectory file (JSON). Field order is fixed so files diff cleanly:
//
//   {"format_version": 1,
//    "meta": {"expression", "chain_id", "duration_s", "dt", "spec_hash"},
//    "joint_names": [...],
//    "samples": [{"t": s, "q": [rad...]}, ...],
//    "ee_path": [{"t": s, "xyz": [m, m, m], "quat": [w, x, y, z]}, ...]}

#include "expressive/error.hpp"
#include "expressive/trajectory.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace expressive::synthesis {

inline constexpr int kTrajectoryFormatVersion = 1;

inline nlohmann::ordered_json trajectory_to_json(const TimedJointTrajectory& traj) {
  nlohmann::ordered_json j;
  j["format_version"] = kTrajectoryFormatVersion;
  j["meta"] = {{"expression", traj.meta.expression},
               {"chain_id", traj.meta.chain_id},
               {"duration_s", traj.meta.duration_s},
               {"dt", traj.meta.dt},
               {"spec_hash", traj.meta.spec_hash}};
  j["joint_names"] = traj.joint_names;
  auto& samples = j["samples"] = nlohmann::ordered_json::array();
  for (const auto& s : traj.samples) {
    nlohmann::ordered_json e;
    e["t"] = s.t;
    e["q"] = std::vector<double>(s.q.angles.begin(), s.q.angles.end());
    samples.push_back(std::move(e));
  }
  auto& ee = j["ee_path"] = nlohmann::ordered_json::array();
  for (const auto& p : traj.ee_path) {
    const auto& x = p.pose.position;
    const auto& q = p.pose.orientation;
    nlohmann::ordered_json e;
    e["t"] = p.t;
    e["xyz"] = {x.x(), x.y(), x.z()};
    e["quat"] = {q.w(), q.x(), q.y(), q.z()};
    ee.push_back(std::move(e));
  }
  return j;
}

inline TimedJointTrajectory trajectory_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format_version").get<int>() != kTrajectoryFormatVersion)
      throw InputError("trajectory: unsupported format_version " + j.at("format_version").dump());
    TimedJointTrajectory t;
    const auto& m = j.at("meta");
    t.meta.expression = m.at("expression").get<std::string>();
    t.meta.chain_id = m.at("chain_id").get<std::string>();
    t.meta.duration_s = m.at("duration_s").get<double>();
    t.meta.dt = m.at("dt").get<double>();
    t.meta.spec_hash = m.at("spec_hash").get<std::string>();
    t.dt = t.meta.dt;
    t.joint_names = j.at("joint_names").get<std::vector<std::string>>();
    for (const auto& s : j.at("samples")) {
      const auto q = s.at("q").get<std::vector<double>>();
      if (q.size() != t.joint_names.size()) throw InputError("trajectory: sample width differs from joint_names");
      t.samples.push_back(
          {s.at("t").get<double>(),
           JointConfig(Eigen::Map<const Eigen::VectorXd>(q.data(), static_cast<Eigen::Index>(q.size())))});
    }
    for (const auto& p : j.at("ee_path")) {
      const auto xyz = p.at("xyz").get<std::vector<double>>();
      const auto quat = p.at("quat").get<std::vector<double>>();
      if (xyz.size() != 3 || quat.size() != 4) throw InputError("trajectory: malformed ee_path entry");
      EePoint e;
      e.t = p.at("t").get<double>();
      e.pose.position = {xyz[0], xyz[1], xyz[2]};
      e.pose.orientation = kinematics::Quaternion(quat[0], quat[1], quat[2], quat[3]);
      t.ee_path.push_back(e);
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("trajectory: ") + e.what());
  }
}

inline std::string trajectory_to_string(const TimedJointTrajectory& traj) {
  return trajectory_to_json(traj).dump(2) + "\n";
}

inline void save_trajectory(const TimedJointTrajectory& traj, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ProcessingError("io", "cannot write '" + path + "'");
  out << trajectory_to_string(traj);
  if (!out) throw ProcessingError("io", "write failed for '" + path + "'");
}

inline TimedJointTrajectory load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open trajectory file '" + path + "'");
  try {
    return trajectory_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("trajectory file '" + path + "': " + e.what());
  }
}

}  // namespace expressive::synthesis
