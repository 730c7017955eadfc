#pragma once

// Chain definition file (JSON). Units: meters and radians. Quaternions are
// stored as [w, x, y, z].
//
//   {
//     "format_version": 1,
//     "id": "...",
//     "units": {"length": "m", "angle": "rad"},
//     "wrist_joint_count": 2,
//     "home": [...],
//     "joints": [{"name", "parent_translation", "parent_rotation_wxyz", "axis",
//                 "limit_lo", "limit_hi"}, ...],
//     "ee_offset": {"translation": [...], "rotation_wxyz": [...]}
//   }

#include "expressive/error.hpp"
#include "expressive/kinematics.hpp"

#include <json.hpp>

#include <fstream>
#include <string>

namespace expressive::kinematics {

inline constexpr int kChainFormatVersion = 1;

namespace detail {

inline nlohmann::ordered_json vec_json(const Vector3& v) { return {v.x(), v.y(), v.z()}; }
inline nlohmann::ordered_json quat_json(const Quaternion& q) { return {q.w(), q.x(), q.y(), q.z()}; }

inline Vector3 vec_from(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) throw InputError(field + ": expected array of 3 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline Quaternion quat_from(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 4) throw InputError(field + ": expected [w, x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

}  // namespace detail

inline nlohmann::ordered_json chain_to_json(const KinematicChain& chain) {
  nlohmann::ordered_json j;
  j["format_version"] = kChainFormatVersion;
  j["id"] = chain.id();
  j["units"] = {{"length", "m"}, {"angle", "rad"}};
  j["wrist_joint_count"] = chain.wrist_joint_count();
  j["home"] = std::vector<double>(chain.home().angles.begin(), chain.home().angles.end());
  auto& joints = j["joints"] = nlohmann::ordered_json::array();
  for (const auto& jt : chain.joints()) {
    nlohmann::ordered_json e;
    e["name"] = jt.name;
    e["parent_translation"] = detail::vec_json(jt.parent.translation);
    e["parent_rotation_wxyz"] = detail::quat_json(jt.parent.rotation);
    e["axis"] = detail::vec_json(jt.axis);
    e["limit_lo"] = jt.limit_lo;
    e["limit_hi"] = jt.limit_hi;
    joints.push_back(std::move(e));
  }
  j["ee_offset"] = {{"translation", detail::vec_json(chain.ee_offset().translation)},
                    {"rotation_wxyz", detail::quat_json(chain.ee_offset().rotation)}};
  return j;
}

inline KinematicChain chain_from_json(const nlohmann::json& j) {
  try {
    if (!j.contains("format_version")) throw InputError("chain: missing format_version");
    if (j.at("format_version").get<int>() != kChainFormatVersion)
      throw InputError("chain: unsupported format_version " + j.at("format_version").dump());
    std::vector<RevoluteJoint> joints;
    for (const auto& e : j.at("joints")) {
      RevoluteJoint jt;
      jt.name = e.at("name").get<std::string>();
      jt.parent.translation = detail::vec_from(e.at("parent_translation"), jt.name + ".parent_translation");
      jt.parent.rotation = detail::quat_from(e.at("parent_rotation_wxyz"), jt.name + ".parent_rotation_wxyz");
      jt.axis = detail::vec_from(e.at("axis"), jt.name + ".axis");
      jt.limit_lo = e.at("limit_lo").get<double>();
      jt.limit_hi = e.at("limit_hi").get<double>();
      joints.push_back(std::move(jt));
    }
    RigidTransform ee;
    ee.translation = detail::vec_from(j.at("ee_offset").at("translation"), "ee_offset.translation");
    ee.rotation = detail::quat_from(j.at("ee_offset").at("rotation_wxyz"), "ee_offset.rotation_wxyz");
    const auto home = j.at("home").get<std::vector<double>>();
    JointConfig q(Eigen::Map<const Eigen::VectorXd>(home.data(), static_cast<Eigen::Index>(home.size())));
    return KinematicChain(j.at("id").get<std::string>(), std::move(joints), ee,
                          j.at("wrist_joint_count").get<std::size_t>(), std::move(q));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("chain: ") + e.what());
  }
}

inline KinematicChain load_chain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open chain file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("chain file '" + path + "': " + e.what());
  }
  return chain_from_json(j);
}

}  // namespace expressive::kinematics
