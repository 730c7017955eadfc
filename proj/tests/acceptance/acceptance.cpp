// Acceptance gate: one PASS/FAIL line per headline criterion, non-zero exit on
// any failure.

#include "expressive/analysis/summary.hpp"
#include "expressive/features.hpp"
#include "expressive/trajectory_io.hpp"
#include "reference/stats_reference.hpp"
#include "test_support.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace expressive;
using laban::Expression;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(const std::string& name, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0.0) o.require(secs < budget_s, "runtime over " + std::to_string(budget_s) + " s");
  if (!o.pass) ++failures;
  std::printf("%s  %-24s %7.2f s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs, o.detail.str().c_str());
  std::fflush(stdout);
}

struct Row {
  Expression e;
  laban::Time time;
  laban::Space space;
  laban::Flow flow;
  laban::Weight weight;
  laban::ShapeForm form;
  laban::ShapeQuality quality;
  laban::ChangeMode mode;
};

void preset_fidelity(Outcome& o) {
  using namespace laban;
  const Row table[] = {
      {Expression::Happy, Time::Sudden, Space::Indirect, Flow::Free, Weight::Strong, ShapeForm::Wall, ShapeQuality::None,
       ChangeMode::None},
      {Expression::Sad, Time::Sustained, Space::Direct, Flow::Bound, Weight::Strong, ShapeForm::Ball, ShapeQuality::None,
       ChangeMode::None},
      {Expression::Shy, Time::Sustained, Space::Direct, Flow::Bound, Weight::Strong, ShapeForm::Screw,
       ShapeQuality::None, ChangeMode::None},
      {Expression::Angry, Time::Sudden, Space::Direct, Flow::Bound, Weight::Strong, ShapeForm::Pin, ShapeQuality::None,
       ChangeMode::None},
      {Expression::SpokeHesitant, Time::Sustained, Space::Direct, Flow::Bound, Weight::Strong, ShapeForm::Screw,
       ShapeQuality::Retreating, ChangeMode::SpokeLike},
      {Expression::ArcHesitant, Time::Sustained, Space::Indirect, Flow::Free, Weight::Strong, ShapeForm::Screw,
       ShapeQuality::Retreating, ChangeMode::ArcLike},
  };
  int effort_fields = 0, shape_settings = 0;
  for (const auto& r : table) {
    const auto s = preset(r.e);
    effort_fields += (s.effort.time == r.time) + (s.effort.space == r.space) + (s.effort.flow == r.flow) +
                     (s.effort.weight == r.weight);
    shape_settings += s.shape == ShapeSettings{r.form, r.quality, r.mode};
  }
  o.detail << effort_fields << "/24 Effort fields, " << shape_settings << "/6 Shape settings";
  o.require(effort_fields == 24 && shape_settings == 6, "table mismatch");
}

void round_trip(Outcome& o, const kinematics::KinematicChain& chain) {
  int exact = 0;
  for (auto e : laban::kAllExpressions) {
    const auto spec = laban::preset(e);
    const auto traj = synthesis::synthesize(chain, spec, synthesis::default_scene());
    const auto est = synthesis::classify_effort(
        synthesis::measure_features(traj, synthesis::default_scene(), chain.wrist_joint_count()));
    if (est.effort == spec.effort && est.quality == spec.shape.quality) ++exact;
    else o.detail << " " << laban::to_string(e) << " misclassified;";
  }
  o.detail << exact << "/6 exact";
  o.require(exact == 6, "round trip");
}

void controlled_difference(Outcome& o, const kinematics::KinematicChain& chain) {
  const auto scene = synthesis::default_scene();
  const auto shy_spec = laban::preset(Expression::Shy);
  const auto spoke_spec = laban::preset(Expression::SpokeHesitant);
  const auto shy = synthesis::build_geometric_path(scene, shy_spec);
  const auto stripped = synthesis::strip_retreats(synthesis::build_geometric_path(scene, spoke_spec));
  double worst = 0.0;
  o.require(shy.segments.size() == stripped.segments.size(), "segment count");
  for (std::size_t i = 0; i < std::min(shy.segments.size(), stripped.segments.size()); ++i)
    for (int k = 0; k <= 200; ++k)
      worst = std::max(worst, (shy.segments[i].at(k / 200.0) - stripped.segments[i].at(k / 200.0)).norm());
  o.require(worst <= 1e-9, "paths differ");

  const auto f_shy = synthesis::measure_features(synthesis::synthesize(chain, shy_spec, scene), scene,
                                                 chain.wrist_joint_count());
  const auto f_spoke = synthesis::measure_features(synthesis::synthesize(chain, spoke_spec, scene), scene,
                                                   chain.wrist_joint_count());
  const int expect = 2 * spoke_spec.retreat.count_per_segment;
  for (std::size_t leg = 0; leg < 3; ++leg) {
    o.require(f_shy.legs[leg].reversal_count == 0, "Shy leg reverses");
    o.require(f_spoke.legs[leg].reversal_count == expect, "SpokeHesitant leg reversal count");
  }
  o.detail << "max deviation " << worst << " m; reversals per leg Shy " << f_shy.legs[0].reversal_count << "/"
           << f_shy.legs[1].reversal_count << "/" << f_shy.legs[2].reversal_count << ", SpokeHesitant "
           << f_spoke.legs[0].reversal_count << "/" << f_spoke.legs[1].reversal_count << "/"
           << f_spoke.legs[2].reversal_count;
}

void weight_lock(Outcome& o, const kinematics::KinematicChain& chain) {
  int locked = 0;
  for (auto e : laban::kAllExpressions) {
    const auto traj = synthesis::synthesize(chain, laban::preset(e), synthesis::default_scene());
    bool exact = true;
    for (const auto& s : traj.samples)
      for (std::size_t j : chain.wrist_joints()) exact = exact && s.q[j] == traj.samples.front().q[j];
    locked += exact;
  }
  o.detail << locked << "/6 presets with zero wrist variation";
  o.require(locked == 6, "wrist moved");
}

void kinematics_suite(Outcome& o, const kinematics::KinematicChain& chain) {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto q = testing_support::random_config(chain, rng);
    const auto j = kinematics::jacobian(chain, q);
    const auto fd = testing_support::finite_difference_jacobian(chain, q, 1e-6);
    for (Eigen::Index c = 0; c < j.cols(); ++c) worst = std::max(worst, (j.col(c) - fd.col(c)).norm() / j.col(c).norm());
  }
  o.require(worst <= 1e-5, "Jacobian");

  std::mt19937_64 targets(99);
  std::uniform_real_distribution<double> nudge(-0.3, 0.3);
  int ok = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto q_true = testing_support::random_config(chain, targets);
    kinematics::JointConfig seed = q_true;
    for (std::size_t i = 0; i < chain.size(); ++i) seed[i] += nudge(targets);
    seed = chain.clamp(seed);
    const auto target = kinematics::forward_kinematics(chain, q_true);
    const auto r = kinematics::solve_ik(chain, target, seed);
    const auto got = kinematics::forward_kinematics(chain, r.config);
    if (r.converged && (got.position - target.position).norm() <= 1e-4 &&
        testing_support::orientation_distance(target.orientation, got.orientation) <= 1e-3)
      ++ok;
  }
  o.require(ok >= 990, "IK convergence");
  o.detail << "Jacobian worst relative error " << worst << "; IK " << ok << "/1000 converged";
}

void statistics_oracle(Outcome& o) {
  using analysis::NamedGroup;
  const auto two = analysis::tukey_hsd({{"a", {1, 2}}, {"b", {3, 4}}});
  o.require(two.anova.f == 8.0, "F != 8");
  o.require(two.anova.df_between == 1 && two.anova.df_within == 2, "df");
  o.require(std::abs(two.pairs[0].q - 4.0) <= 1e-12, "q != 4");

  std::vector<NamedGroup> six;
  for (const auto& g : reference::kSixGroups) six.push_back({g.name, g.values});
  const auto c = analysis::tukey_hsd(six);
  double worst = 0.0;
  for (std::size_t i = 0; i < c.pairs.size(); ++i)
    worst = std::max(worst, std::abs(c.pairs[i].p_adjusted - reference::kSixGroupsTukeyP[i]));
  o.require(c.pairs.size() == reference::kSixGroupsTukeyP.size() && worst <= 1e-4, "Tukey reference");

  double worst_t = 0.0;
  for (double nu : {2.0, 5.0, 17.0, 120.0})
    for (double t : {0.1, 0.7, 1.5, 2.2, 3.9, 6.0}) {
      const boost::math::students_t dist(nu);
      const double tp = 2.0 * boost::math::cdf(boost::math::complement(dist, t));
      worst_t = std::max(worst_t, std::abs(analysis::studentized_range_sf(std::sqrt(2.0) * t, 2, nu) - tp));
    }
  o.require(worst_t <= 1e-6, "k = 2 vs t-test");
  o.detail << "F = " << two.anova.f << ", q = " << two.pairs[0].q << "; reference max |dp| " << worst
           << "; k=2 vs t max |dp| " << worst_t;
}

void null_calibration(Outcome& o) {
  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> ps;
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<analysis::NamedGroup> groups(6);
    for (auto& g : groups)
      for (int i = 0; i < 49; ++i) g.values.push_back(z(rng));
    ps.push_back(analysis::one_way_anova(groups).p);
  }
  std::sort(ps.begin(), ps.end());
  const double n = static_cast<double>(ps.size());
  double d = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i)
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - ps[i], ps[i] - static_cast<double>(i) / n});
  const double sn = std::sqrt(n);
  const double stat = (sn + 0.12 + 0.11 / sn) * d;
  o.detail << "KS D = " << d << ", scaled " << stat << " (critical 1.628 at 1%)";
  o.require(stat < 1.628, "p-values not uniform");
}

void determinism(Outcome& o) {
  testing_support::TempDir dir("acceptance");
  int identical = 0;
  for (auto e : laban::kAllExpressions) {
    std::string files[2];
    for (int run = 0; run < 2; ++run) {
      const std::string out = dir.file(std::string(laban::to_string(e)) + "_" + std::to_string(run) + ".json");
      const std::string cmd = std::string("\"") + EXPRESSIVE_CLI_PATH + "\" synth -e " +
                              std::string(laban::to_string(e)) + " -o \"" + out + "\"";
      if (std::system(cmd.c_str()) != 0) throw std::runtime_error("command failed: " + cmd);
      files[run] = testing_support::read_file(out);
    }
    identical += !files[0].empty() && files[0] == files[1];
  }
  o.detail << identical << "/6 presets byte-identical across two CLI runs";
  o.require(identical == 6, "output differs");
}

}  // namespace

int main() {
  const auto chain = kinematics::default_chain();
  criterion("preset-fidelity", 1.0, preset_fidelity);
  criterion("round-trip", 30.0, [&](Outcome& o) { round_trip(o, chain); });
  criterion("controlled-difference", 0.0, [&](Outcome& o) { controlled_difference(o, chain); });
  criterion("weight-lock", 0.0, [&](Outcome& o) { weight_lock(o, chain); });
  criterion("kinematics-suite", 60.0, [&](Outcome& o) { kinematics_suite(o, chain); });
  criterion("statistics-oracle", 30.0, statistics_oracle);
  criterion("null-calibration", 0.0, null_calibration);
  criterion("determinism", 0.0, determinism);
  std::printf("%s: %d failure(s)\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
