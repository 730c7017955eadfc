#pragma once

// Three guide lines A, B, C with one waypoint picked on each. The end effector
// visits A -> B -> C -> A.

#include "expressive/error.hpp"
#include "expressive/kinematics.hpp"

#include <json.hpp>

#include <array>
#include <fstream>
#include <string>

namespace expressive::synthesis {

using kinematics::Vector3;

struct LineSegment {
  Vector3 p0 = Vector3::Zero();
  Vector3 p1 = Vector3::Zero();

  Vector3 at(double s) const { return p0 + s * (p1 - p0); }
  double length() const { return (p1 - p0).norm(); }
};

struct WaypointScene {
  std::array<LineSegment, 3> lines;  ///< A, B, C
  std::array<double, 3> picks{0.5, 0.5, 0.5};

  Vector3 waypoint(std::size_t line) const { return lines.at(line).at(picks.at(line)); }

  /// Visit order A, B, C, A.
  std::array<Vector3, 4> circuit() const { return {waypoint(0), waypoint(1), waypoint(2), waypoint(0)}; }

  void validate() const {
    static constexpr const char* names[] = {"line_a", "line_b", "line_c"};
    for (std::size_t i = 0; i < 3; ++i) {
      if (!(lines[i].length() > 1e-6)) throw InputError(std::string(names[i]) + ": degenerate segment");
      if (!(picks[i] >= 0.0 && picks[i] <= 1.0))
        throw InputError(std::string("pick_") + "abc"[i] + ": must lie in [0, 1]");
    }
    for (std::size_t i = 0; i < 3; ++i)
      if ((waypoint(i) - waypoint((i + 1) % 3)).norm() <= 1e-6)
        throw InputError("scene: consecutive waypoints coincide");
  }
};

/// Lines run along +x in front of the default chain; A and C flank B, which
/// sits higher. Picks at the midpoints give waypoints (0.5, -0.2, 0.35),
/// (0.5, 0, 0.5) and (0.5, 0.2, 0.35).
inline WaypointScene default_scene() {
  WaypointScene s;
  s.lines[0] = {{0.40, -0.20, 0.35}, {0.60, -0.20, 0.35}};
  s.lines[1] = {{0.40, 0.00, 0.50}, {0.60, 0.00, 0.50}};
  s.lines[2] = {{0.40, 0.20, 0.35}, {0.60, 0.20, 0.35}};
  return s;
}

/// Position-only IK from the chain's home config to each waypoint.
inline void verify_reachable(const kinematics::KinematicChain& chain, const WaypointScene& scene) {
  kinematics::IkOptions opt;
  opt.task = kinematics::IkTask::PositionOnly;
  for (std::size_t i = 0; i < 3; ++i) {
    kinematics::Pose target;
    target.position = scene.waypoint(i);
    const auto r = kinematics::solve_ik(chain, target, chain.home(), std::nullopt, {}, opt);
    if (!r.converged)
      throw InputError(std::string("scene: waypoint on line ") + "ABC"[i] + " unreachable by chain '" + chain.id() +
                       "' (residual " + std::to_string(r.position_error) + " m)");
  }
}

inline nlohmann::ordered_json scene_to_json(const WaypointScene& s) {
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["units"] = "m";
  static constexpr const char* names[] = {"line_a", "line_b", "line_c"};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& l = s.lines[i];
    j[names[i]] = {{l.p0.x(), l.p0.y(), l.p0.z()}, {l.p1.x(), l.p1.y(), l.p1.z()}};
  }
  j["pick_a"] = s.picks[0];
  j["pick_b"] = s.picks[1];
  j["pick_c"] = s.picks[2];
  return j;
}

/// Applies any of line_a/b/c and pick_a/b/c present in `j` on top of `base`.
inline WaypointScene scene_from_json(const nlohmann::json& j, WaypointScene base = default_scene()) {
  if (!j.is_object()) throw InputError("scene: expected an object");
  static constexpr const char* lines[] = {"line_a", "line_b", "line_c"};
  static constexpr const char* picks[] = {"pick_a", "pick_b", "pick_c"};
  try {
    for (std::size_t i = 0; i < 3; ++i) {
      if (j.contains(lines[i])) {
        const auto& l = j.at(lines[i]);
        if (!l.is_array() || l.size() != 2 || l[0].size() != 3 || l[1].size() != 3)
          throw InputError(std::string("scene.") + lines[i] + ": expected [[x,y,z],[x,y,z]]");
        base.lines[i].p0 = {l[0][0].get<double>(), l[0][1].get<double>(), l[0][2].get<double>()};
        base.lines[i].p1 = {l[1][0].get<double>(), l[1][1].get<double>(), l[1][2].get<double>()};
      }
      if (j.contains(picks[i])) base.picks[i] = j.at(picks[i]).get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("scene: ") + e.what());
  }
  base.validate();
  return base;
}

/// "default" selects the built-in scene.
inline WaypointScene load_scene(const std::string& path) {
  if (path == "default") return default_scene();
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scene file '" + path + "'");
  try {
    return scene_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("scene file '" + path + "': " + e.what());
  }
}

}  // namespace expressive::synthesis
