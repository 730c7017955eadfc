#pragma once

// Two-view SVG of an end-effector path: top-down (x right, y up) and side
// (x right, z up). Retreat portions are stroked red and dashed.

#include "expressive/scene.hpp"
#include "expressive/trajectory.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <sstream>
#include <string>

namespace expressive::synthesis {

namespace detail {

inline std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace detail

inline std::string render_svg(const TimedJointTrajectory& traj, const WaypointScene* scene = nullptr) {
  constexpr double panel = 360.0;
  constexpr double margin = 30.0;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 2 * panel + 3 * margin << "\" height=\""
      << panel + 2 * margin + 20 << "\" viewBox=\"0 0 " << 2 * panel + 3 * margin << " " << panel + 2 * margin + 20
      << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Shared bounds over all three axes keep both views at the same scale.
  Vector3 lo = Vector3::Constant(1e9), hi = Vector3::Constant(-1e9);
  for (const auto& p : traj.ee_path) {
    lo = lo.cwiseMin(p.pose.position);
    hi = hi.cwiseMax(p.pose.position);
  }
  if (scene)
    for (const auto& l : scene->lines) {
      lo = lo.cwiseMin(l.p0).cwiseMin(l.p1);
      hi = hi.cwiseMax(l.p0).cwiseMax(l.p1);
    }
  const double span = std::max((hi - lo).maxCoeff(), 1e-6) * 1.1;
  const Vector3 mid = 0.5 * (lo + hi);

  struct View {
    int h, v;
    const char* title;
    double x0;
  };
  const std::array<View, 2> views{View{0, 1, "top (x, y)", margin}, View{0, 2, "side (x, z)", 2 * margin + panel}};
  for (const auto& view : views) {
    auto px = [&](const Vector3& p) {
      return std::pair{view.x0 + panel / 2 + (p[view.h] - mid[view.h]) / span * panel,
                       margin + 20 + panel / 2 - (p[view.v] - mid[view.v]) / span * panel};
    };
    svg << "<g>\n<rect x=\"" << view.x0 << "\" y=\"" << margin + 20 << "\" width=\"" << panel << "\" height=\""
        << panel << "\" fill=\"none\" stroke=\"#bbb\"/>\n";
    svg << "<text x=\"" << view.x0 << "\" y=\"" << margin + 12 << "\" font-family=\"sans-serif\" font-size=\"14\">"
        << view.title << "</text>\n";
    if (scene)
      for (const auto& l : scene->lines) {
        auto [x0, y0] = px(l.p0);
        auto [x1, y1] = px(l.p1);
        svg << "<line x1=\"" << detail::fmt2(x0) << "\" y1=\"" << detail::fmt2(y0) << "\" x2=\"" << detail::fmt2(x1)
            << "\" y2=\"" << detail::fmt2(y1) << "\" stroke=\"#8ab\" stroke-width=\"3\"/>\n";
      }
    // Contiguous runs of one phase become one polyline.
    std::size_t i = 0;
    const std::size_t n = traj.ee_path.size();
    while (i + 1 < n) {
      const bool retreat = i < traj.phases.size() && traj.phases[i + 1] == Phase::Retreat;
      std::size_t j = i + 1;
      while (j + 1 < n && (j + 1 < traj.phases.size() && traj.phases[j + 1] == Phase::Retreat) == retreat) ++j;
      svg << "<polyline class=\"" << (retreat ? "retreat" : "advance") << "\" fill=\"none\" stroke=\""
          << (retreat ? "#d22" : "#222") << "\" stroke-width=\"" << (retreat ? 2.5 : 1.5) << "\""
          << (retreat ? " stroke-dasharray=\"5,3\"" : "") << " points=\"";
      for (std::size_t k = i; k <= j; ++k) {
        auto [x, y] = px(traj.ee_path[k].pose.position);
        svg << detail::fmt2(x) << "," << detail::fmt2(y) << (k < j ? " " : "");
      }
      svg << "\"/>\n";
      i = j;
    }
    svg << "</g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace expressive::synthesis
