#pragma once

// HTTP/JSON API as a pure function of (context, method, path, body). The
// socket layer in server.hpp only forwards to handle_request.
//
//   GET  /healthz          liveness
//   GET  /api/presets      the six preset specs
//   GET  /api/chain        chain description, default scene, wrist joints
//   POST /api/synthesize   {"preset"|"spec", "scene"?, "dt"?, "seed"?, "svg"?}
//   POST /api/analyze      {"labels_csv", "lexicon_tsv", "signed_lexicon"?, "alpha"?}
//                          or {"groups": [{"name", "values"}], "alpha"?}
//
// Every response body carries "schema_version". Errors: 400 with "issues"
// [{field, message}], 422 with the failing "stage", 404 unknown route,
// 405 wrong method, 503 when synthesis runs past the request timeout.

#include "expressive/analysis/labels.hpp"
#include "expressive/analysis/lexicon.hpp"
#include "expressive/analysis/summary.hpp"
#include "expressive/chain_io.hpp"
#include "expressive/error.hpp"
#include "expressive/features.hpp"
#include "expressive/kinematics.hpp"
#include "expressive/laban.hpp"
#include "expressive/laban_io.hpp"
#include "expressive/scene.hpp"
#include "expressive/svg.hpp"
#include "expressive/trajectory.hpp"
#include "expressive/trajectory_io.hpp"

#include <json.hpp>

#include <chrono>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace expressive::service {

inline constexpr int kSchemaVersion = 1;

/// Immutable per-process configuration shared by all requests.
struct ServiceContext {
  kinematics::KinematicChain chain = kinematics::default_chain();
  synthesis::WaypointScene scene = synthesis::default_scene();
  synthesis::SynthesisConfig synthesis;
  std::chrono::milliseconds timeout{10000};
  double default_alpha = 0.05;
};

struct Response {
  int status = 200;
  nlohmann::ordered_json body;

  std::string text() const { return body.dump(); }
};

namespace detail {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

inline ojson envelope() {
  ojson j;
  j["schema_version"] = kSchemaVersion;
  return j;
}

inline Response ok(ojson body) { return {200, std::move(body)}; }

inline Response error(int status, std::string_view code, std::string_view message) {
  auto j = envelope();
  j["error"] = code;
  j["message"] = message;
  return {status, std::move(j)};
}

struct Issue {
  std::string field;
  std::string message;
};

inline Response bad_request(const std::vector<Issue>& issues) {
  auto j = envelope();
  j["error"] = "invalid_request";
  j["message"] = issues.empty() ? std::string("invalid request") : issues.front().field + ": " + issues.front().message;
  j["issues"] = ojson::array();
  for (const auto& i : issues) j["issues"].push_back({{"field", i.field}, {"message", i.message}});
  return {400, std::move(j)};
}

inline Response bad_request(std::string field, std::string message) {
  return bad_request(std::vector<Issue>{{std::move(field), std::move(message)}});
}

inline Response stage_failure(std::string_view stage, std::string_view message) {
  auto j = envelope();
  j["error"] = "processing_failed";
  j["stage"] = stage;
  j["message"] = message;
  return {422, std::move(j)};
}

inline Response presets() {
  auto j = envelope();
  j["presets"] = ojson::array();
  for (auto e : laban::kAllExpressions) {
    auto s = laban::spec_to_json(laban::preset(e));
    s["pause_count"] = laban::pause_count(laban::preset(e));
    j["presets"].push_back(std::move(s));
  }
  return ok(std::move(j));
}

inline Response chain(const ServiceContext& ctx) {
  auto j = envelope();
  j["chain"] = kinematics::chain_to_json(ctx.chain);
  j["wrist_joints"] = ctx.chain.wrist_joints();
  j["scene"] = synthesis::scene_to_json(ctx.scene);
  j["postures"] = ojson::object();
  for (auto form : {laban::ShapeForm::Wall, laban::ShapeForm::Ball, laban::ShapeForm::Screw, laban::ShapeForm::Pin}) {
    const auto p = laban::posture_for(form);
    j["postures"][std::string(laban::to_string(form))] = {
        {"q_ref", std::vector<double>(p.q_ref.angles.begin(), p.q_ref.angles.end())},
        {"ee_pitch_deg", p.ee_pitch_deg}};
  }
  return ok(std::move(j));
}

inline Response synthesize(const ServiceContext& ctx, const json& body) {
  if (!body.is_object()) return bad_request("body", "expected a JSON object");

  laban::ExpressionSpec spec;
  try {
    if (body.contains("spec")) {
      const auto& s = body.at("spec");
      if (s.is_string()) spec = laban::preset(s.get<std::string>());
      else spec = laban::spec_from_json(s);
    } else if (body.contains("preset")) {
      if (!body.at("preset").is_string()) return bad_request("preset", "expected a preset name");
      spec = laban::preset(body.at("preset").get<std::string>());
    } else {
      return bad_request("spec", "either \"spec\" or \"preset\" is required");
    }
  } catch (const InputError& e) {
    return bad_request(body.contains("spec") ? "spec" : "preset", e.what());
  }

  if (body.contains("seed")) {
    if (!body.at("seed").is_number_unsigned()) return bad_request("seed", "expected a non-negative integer");
    spec.retreat.jitter_seed = body.at("seed").get<std::uint64_t>();
  }

  const auto report = laban::validate_spec(spec);
  if (!report.ok()) {
    std::vector<Issue> issues;
    for (const auto& i : report.errors) issues.push_back({i.field, i.message});
    return bad_request(issues);
  }

  synthesis::WaypointScene scene = ctx.scene;
  if (body.contains("scene")) {
    try {
      scene = synthesis::scene_from_json(body.at("scene"), ctx.scene);
    } catch (const InputError& e) {
      return bad_request("scene", e.what());
    }
  }

  synthesis::SynthesisConfig config = ctx.synthesis;
  if (body.contains("dt")) {
    const auto& d = body.at("dt");
    if (!d.is_number() || !(d.get<double>() > 0.0)) return bad_request("dt", "expected a positive number");
    config.dt = d.get<double>();
  }
  const bool want_svg = body.value("svg", false);
  config.deadline = std::chrono::steady_clock::now() + ctx.timeout;

  synthesis::TimedJointTrajectory traj;
  try {
    synthesis::verify_reachable(ctx.chain, scene);
  } catch (const InputError& e) {
    return stage_failure("scene", e.what());
  }
  try {
    traj = synthesis::synthesize(ctx.chain, spec, scene, config);
  } catch (const TimeoutError& e) {
    return error(503, "timeout", e.what());
  } catch (const ProcessingError& e) {
    return stage_failure(e.stage(), e.what());
  } catch (const InputError& e) {
    return bad_request("spec", e.what());
  }

  const auto features = synthesis::measure_features(traj, scene, ctx.chain.wrist_joint_count());
  auto j = envelope();
  j["spec"] = laban::spec_to_json(spec);
  j["trajectory"] = synthesis::trajectory_to_json(traj);
  j["phases"] = ojson::array();
  for (auto p : traj.phases) j["phases"].push_back(synthesis::to_string(p));
  j["features"] = synthesis::features_to_json(features);
  j["classified"] = synthesis::estimate_to_json(synthesis::classify_effort(features));
  j["warnings"] = ojson::array();
  for (const auto& w : report.warnings) j["warnings"].push_back({{"field", w.field}, {"message", w.message}});
  if (want_svg) j["svg"] = synthesis::render_svg(traj, &scene);
  return ok(std::move(j));
}

inline Response analyze(const ServiceContext& ctx, const json& body) {
  if (!body.is_object()) return bad_request("body", "expected a JSON object");
  double alpha = ctx.default_alpha;
  if (body.contains("alpha")) {
    const auto& a = body.at("alpha");
    if (!a.is_number() || !(a.get<double>() > 0.0 && a.get<double>() < 1.0))
      return bad_request("alpha", "expected a number in (0, 1)");
    alpha = a.get<double>();
  }

  if (body.contains("groups")) {
    const auto& g = body.at("groups");
    if (!g.is_array()) return bad_request("groups", "expected an array");
    std::vector<analysis::NamedGroup> groups;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const std::string field = "groups[" + std::to_string(i) + "]";
      if (!g[i].is_object() || !g[i].contains("values") || !g[i].at("values").is_array())
        return bad_request(field, "expected {\"name\", \"values\": [numbers]}");
      analysis::NamedGroup ng;
      ng.name = g[i].value("name", "group" + std::to_string(i));
      for (const auto& v : g[i].at("values")) {
        if (!v.is_number()) return bad_request(field + ".values", "expected numbers");
        ng.values.push_back(v.get<double>());
      }
      groups.push_back(std::move(ng));
    }
    try {
      auto j = envelope();
      j["comparison"] = analysis::comparison_to_json(analysis::tukey_hsd(groups, alpha));
      return ok(std::move(j));
    } catch (const DegenerateInputError& e) {
      return stage_failure("anova", e.what());
    } catch (const InputError& e) {
      return bad_request("groups", e.what());
    }
  }

  if (!body.contains("labels_csv") || !body.at("labels_csv").is_string())
    return bad_request("labels_csv", "expected the labels file contents as a string");
  if (!body.contains("lexicon_tsv") || !body.at("lexicon_tsv").is_string())
    return bad_request("lexicon_tsv", "expected the lexicon file contents as a string");
  analysis::LexiconOptions lex_opt;
  lex_opt.signed_range = body.value("signed_lexicon", false);

  analysis::VadLexicon lexicon;
  std::vector<analysis::LabelRecord> labels;
  try {
    std::istringstream in(body.at("lexicon_tsv").get<std::string>());
    lexicon = analysis::load_lexicon(in, lex_opt);
  } catch (const InputError& e) {
    return bad_request("lexicon_tsv", e.what());
  }
  try {
    std::istringstream in(body.at("labels_csv").get<std::string>());
    labels = analysis::load_labels(in);
  } catch (const InputError& e) {
    return bad_request("labels_csv", e.what());
  }
  auto j = envelope();
  j["report"] = analysis::report_to_json(analysis::analyze_labels(labels, lexicon, alpha));
  return ok(std::move(j));
}

}  // namespace detail

/// Pure request handler; safe to call concurrently on a shared context.
inline Response handle_request(const ServiceContext& ctx, std::string_view method, std::string_view path,
                               std::string_view body = {}) {
  if (const auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);

  struct Route {
    std::string_view method;
    std::string_view path;
  };
  static constexpr Route routes[] = {{"GET", "/healthz"},
                                     {"GET", "/api/presets"},
                                     {"GET", "/api/chain"},
                                     {"POST", "/api/synthesize"},
                                     {"POST", "/api/analyze"}};
  bool known_path = false;
  bool matched = false;
  for (const auto& r : routes)
    if (r.path == path) {
      known_path = true;
      matched = matched || r.method == method;
    }
  if (!known_path) return detail::error(404, "not_found", "no route for " + std::string(path));
  if (!matched) return detail::error(405, "method_not_allowed", std::string(method) + " not allowed on " + std::string(path));

  try {
    if (path == "/healthz") {
      auto j = detail::envelope();
      j["status"] = "ok";
      return detail::ok(std::move(j));
    }
    if (path == "/api/presets") return detail::presets();
    if (path == "/api/chain") return detail::chain(ctx);

    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      return detail::bad_request("body", std::string("malformed JSON: ") + e.what());
    }
    if (path == "/api/synthesize") return detail::synthesize(ctx, parsed);
    return detail::analyze(ctx, parsed);
  } catch (const nlohmann::json::exception& e) {
    return detail::bad_request("body", e.what());
  } catch (const InputError& e) {
    return detail::bad_request("body", e.what());
  } catch (const ProcessingError& e) {
    return detail::stage_failure(e.stage(), e.what());
  } catch (const std::exception& e) {
    return detail::error(500, "internal_error", e.what());
  }
}

}  // namespace expressive::service
