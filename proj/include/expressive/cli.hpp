#pragma once

// `expressive` command line. run_cli is separate from main() so tests can
// drive it with string streams.
//
// Exit codes: 0 success, 1 usage error (bad flags, unknown expression or
// subcommand), 2 processing error (unreadable or malformed inputs, synthesis
// or analysis failure).
//
// Precedence: command-line flags > config file > built-in defaults. The config
// file is --config, or $EXPRESSIVE_CONFIG_DIR/expressive.toml when present.

#include "expressive/analysis/labels.hpp"
#include "expressive/analysis/lexicon.hpp"
#include "expressive/analysis/summary.hpp"
#include "expressive/chain_io.hpp"
#include "expressive/error.hpp"
#include "expressive/features.hpp"
#include "expressive/laban.hpp"
#include "expressive/laban_io.hpp"
#include "expressive/scene.hpp"
#include "expressive/server.hpp"
#include "expressive/service.hpp"
#include "expressive/svg.hpp"
#include "expressive/trajectory.hpp"
#include "expressive/trajectory_io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace expressive::cli {

inline constexpr const char* kConfigDirEnv = "EXPRESSIVE_CONFIG_DIR";
inline constexpr const char* kConfigFileName = "expressive.toml";

struct CliConfig {
  std::string chain_path;  ///< empty: built-in chain
  std::string scene_path = "default";
  std::string out_dir;
  std::optional<double> dt;
  std::optional<std::uint64_t> seed;
  int verbosity = 0;
};

namespace detail {

/// Usage-level failure detected after parsing (e.g. an unknown preset name).
struct UsageError : InputError {
  using InputError::InputError;
};

inline std::string resolve_out(const CliConfig& cfg, const std::string& path) {
  if (cfg.out_dir.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(cfg.out_dir) / path).string();
}

inline void write_file(const std::string& path, const std::string& text) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ProcessingError("output", "cannot write '" + path + "'");
  out << text;
  if (!out) throw ProcessingError("output", "write to '" + path + "' failed");
}

inline kinematics::KinematicChain load_chain(const CliConfig& cfg) {
  return cfg.chain_path.empty() ? kinematics::default_chain() : kinematics::load_chain(cfg.chain_path);
}

/// A preset name, or a path to a spec file.
inline laban::ExpressionSpec resolve_expression(const std::string& arg) {
  if (const auto e = laban::try_parse_expression(arg)) return laban::preset(*e);
  if (std::filesystem::is_regular_file(arg)) return laban::load_spec(arg);
  std::string names;
  for (auto e : laban::kAllExpressions) names += (names.empty() ? "" : ", ") + std::string(laban::to_string(e));
  throw UsageError("unknown expression '" + arg + "' (expected one of " + names + ", or a spec file)");
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return in;
}

inline void print_presets(std::ostream& out) {
  for (auto e : laban::kAllExpressions) {
    const auto s = laban::preset(e);
    out << s.name << ": Time=" << laban::to_string(s.effort.time) << " Space=" << laban::to_string(s.effort.space)
        << " Flow=" << laban::to_string(s.effort.flow) << " Weight=" << laban::to_string(s.effort.weight)
        << " | Form=" << laban::to_string(s.shape.form) << " Quality=" << laban::to_string(s.shape.quality)
        << " Mode=" << laban::to_string(s.shape.mode) << " Duration=" << s.duration_s << "s";
    if (s.shape.quality == laban::ShapeQuality::Retreating)
      out << " Retreats=" << s.retreat.count_per_segment << "/leg";
    out << "\n";
  }
}

inline void print_features(std::ostream& out, const synthesis::MotionFeatures& f,
                           const synthesis::EffortEstimate& e) {
  out << std::setprecision(6);
  out << "duration_s             " << f.duration_s << "\n"
      << "path_length_m          " << f.path_length_m << "\n"
      << "straightness           " << f.straightness << "\n"
      << "reversal_count         " << f.reversal_count << "\n"
      << "via_count              " << f.via_count << "\n"
      << "wrist_displacement_rad " << f.wrist_displacement_rad << "\n"
      << "mean_speed_mps         " << f.mean_speed_mps << "\n";
  for (std::size_t i = 0; i < f.legs.size(); ++i) {
    const auto& l = f.legs[i];
    out << "leg " << "ABC"[i] << "->" << "BCA"[i] << "               straightness=" << l.straightness
        << " reversals=" << l.reversal_count << " vias=" << l.via_count << "\n";
  }
  out << "classified             Time=" << laban::to_string(e.effort.time)
      << " Space=" << laban::to_string(e.effort.space) << " Flow=" << laban::to_string(e.effort.flow)
      << " Weight=" << laban::to_string(e.effort.weight) << " Quality=" << laban::to_string(e.quality) << "\n";
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Expressive trajectory synthesis and label analysis", "expressive"};
  app.require_subcommand(1);
  app.fallthrough();
  app.failure_message(CLI::FailureMessage::help);

  CliConfig cfg;
  std::string default_config;
  if (const char* dir = std::getenv(kConfigDirEnv); dir && *dir) {
    const auto p = std::filesystem::path(dir) / kConfigFileName;
    if (std::filesystem::is_regular_file(p)) default_config = p.string();
  }
  app.set_config("--config", default_config,
                 std::string("TOML/INI config file (default: $") + kConfigDirEnv + "/" + kConfigFileName + ")");
  app.add_option("--chain", cfg.chain_path, "Chain definition JSON (default: built-in 7-joint chain)");
  app.add_option("--out-dir", cfg.out_dir, "Directory that relative output paths are written under");
  app.add_option("--dt", cfg.dt, "Sample period override in seconds")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "Retreat jitter seed override");
  app.add_flag("-v,--verbose", cfg.verbosity, "Log progress to standard error (repeat for more)");

  // presets
  auto* presets = app.add_subcommand("presets", "List the six expression presets");
  bool presets_json = false;
  presets->add_flag("--json", presets_json, "Print the full specs as JSON");

  // synth
  auto* synth = app.add_subcommand("synth", "Synthesize a joint trajectory for an expression");
  std::string expression;
  std::string synth_out;
  std::string synth_svg;
  synth->add_option("-e,--expression", expression, "Preset name or spec JSON file")->required();
  synth->add_option("--scene", cfg.scene_path, "Scene JSON file, or 'default'")->capture_default_str();
  synth->add_option("-o,--out", synth_out, "Trajectory output file (JSON)")->required();
  synth->add_option("--svg", synth_svg, "Also write a top/side path plot");

  // features
  auto* features = app.add_subcommand("features", "Measure a trajectory file and classify its Effort");
  std::string traj_path;
  bool features_json = false;
  features->add_option("-t,--traj", traj_path, "Trajectory JSON file")->required();
  features->add_option("--scene", cfg.scene_path, "Scene the trajectory was synthesized for")->capture_default_str();
  features->add_flag("--json", features_json, "Print JSON instead of a table");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Score labels with a VAD lexicon; ANOVA and Tukey HSD report");
  std::string labels_path;
  std::string lexicon_path;
  std::string report_out;
  double alpha = 0.05;
  bool signed_lexicon = false;
  analyze->add_option("-l,--labels", labels_path, "Labels CSV")->required();
  analyze->add_option("-x,--lexicon", lexicon_path, "Lexicon TSV (word, v, a, d)")->required();
  analyze->add_option("-a,--alpha", alpha, "Significance level")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  analyze->add_flag("--signed-lexicon", signed_lexicon, "Lexicon values are in [-1, 1]; rescale to [0, 1]");
  analyze->add_option("-o,--out", report_out, "Write the report here instead of standard output");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP/JSON service");
  service::ServerOptions server;
  double timeout_s = 10.0;
  serve->add_option("-p,--port", server.port, "TCP port (0 picks a free one)")->capture_default_str();
  serve->add_option("--host", server.host, "Bind address")->capture_default_str();
  serve->add_option("--ui-dir", server.ui_dir, "Static UI bundle served at /");
  serve->add_option("--threads", server.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  serve->add_option("--timeout", timeout_s, "Per-request synthesis timeout in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  const auto log = [&](int level, const std::string& msg) {
    if (cfg.verbosity >= level) err << "[expressive] " << msg << "\n";
  };

  try {
    if (*presets) {
      if (presets_json) {
        out << service::handle_request(service::ServiceContext{}, "GET", "/api/presets").body["presets"].dump(2)
            << "\n";
      } else {
        detail::print_presets(out);
      }
      return 0;
    }

    if (*synth) {
      auto spec = detail::resolve_expression(expression);
      if (cfg.seed) spec.retreat.jitter_seed = *cfg.seed;
      const auto report = laban::validate_spec(spec);
      for (const auto& w : report.warnings) err << "warning: " << w.field << ": " << w.message << "\n";
      if (!report.ok()) {
        for (const auto& e : report.errors) err << "error: " << e.field << ": " << e.message << "\n";
        return 1;
      }
      const auto chain = detail::load_chain(cfg);
      const auto scene = synthesis::load_scene(cfg.scene_path);
      synthesis::verify_reachable(chain, scene);
      synthesis::SynthesisConfig sc;
      if (cfg.dt) sc.dt = *cfg.dt;
      log(1, "synthesizing " + spec.name + " on chain " + chain.id());
      const auto t0 = std::chrono::steady_clock::now();
      const auto traj = synthesis::synthesize(chain, spec, scene, sc);
      log(1, std::to_string(traj.samples.size()) + " samples in " +
                 std::to_string(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()) + " s");
      const auto path = detail::resolve_out(cfg, synth_out);
      detail::write_file(path, synthesis::trajectory_to_string(traj));
      log(1, "wrote " + path);
      if (!synth_svg.empty()) {
        const auto svg_path = detail::resolve_out(cfg, synth_svg);
        detail::write_file(svg_path, synthesis::render_svg(traj, &scene));
        log(1, "wrote " + svg_path);
      }
      return 0;
    }

    if (*features) {
      const auto chain = detail::load_chain(cfg);
      const auto scene = synthesis::load_scene(cfg.scene_path);
      const auto traj = synthesis::load_trajectory(traj_path);
      const auto f = synthesis::measure_features(traj, scene, chain.wrist_joint_count());
      const auto e = synthesis::classify_effort(f);
      if (features_json) {
        nlohmann::ordered_json j;
        j["features"] = synthesis::features_to_json(f);
        j["classified"] = synthesis::estimate_to_json(e);
        out << j.dump(2) << "\n";
      } else {
        detail::print_features(out, f, e);
      }
      return 0;
    }

    if (*analyze) {
      analysis::LexiconOptions lo;
      lo.signed_range = signed_lexicon;
      auto lex_in = detail::open_input(lexicon_path);
      const auto lexicon = analysis::load_lexicon(lex_in, lo);
      auto labels_in = detail::open_input(labels_path);
      const auto labels = analysis::load_labels(labels_in);
      log(1, std::to_string(labels.size()) + " labels, " + std::to_string(lexicon.size()) + " lexicon words");
      const auto report = analysis::analyze_labels(labels, lexicon, alpha);
      const std::string text = analysis::report_to_json(report).dump(2) + "\n";
      if (report_out.empty()) out << text;
      else detail::write_file(detail::resolve_out(cfg, report_out), text);
      for (const auto& w : report.summary.warnings) log(1, "warning: " + w);
      for (const auto& w : report.warnings) log(1, "warning: " + w);
      return 0;
    }

    if (*serve) {
      service::ServiceContext ctx;
      ctx.chain = detail::load_chain(cfg);
      ctx.scene = synthesis::load_scene(cfg.scene_path);
      if (cfg.dt) ctx.synthesis.dt = *cfg.dt;
      ctx.timeout = std::chrono::milliseconds(static_cast<long long>(timeout_s * 1000.0));
      service::Server srv(std::move(ctx), server);
      const int port = srv.bind();
      out << "listening on http://" << server.host << ":" << port << "\n" << std::flush;
      srv.run();
      return 0;
    }
  } catch (const detail::UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const ProcessingError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace expressive::cli
