#include "expressive/cli.hpp"
#include "expressive/server.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

using namespace expressive;
using service::handle_request;
using nlohmann::json;

namespace {

const service::ServiceContext& context() {
  static const service::ServiceContext ctx;
  return ctx;
}

service::Response post(std::string_view path, const json& body) {
  return handle_request(context(), "POST", path, body.dump());
}

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "expressive");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

void write(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

/// Two groups whose valence values are {0.25, 0.5} and {0.75, 1.0}.
void write_two_group_fixture(const testing_support::TempDir& dir) {
  write(dir.file("lexicon.tsv"), "w1\t0.25\t0.25\t0.25\nw2\t0.5\t0.5\t0.5\nw3\t0.75\t0.75\t0.75\nw4\t1\t1\t1\n");
  write(dir.file("labels.csv"),
        "participant_id,expression_shown,rank,label_text\n"
        "p1,Happy,1,w1\np2,Happy,1,w2\np1,Sad,1,w3\np2,Sad,1,w4\n");
}

class ScopedEnv {
public:
  ScopedEnv(const char* name, const std::string& value) : name_(name) {
    if (const char* old = std::getenv(name)) old_ = old;
    ::setenv(name, value.c_str(), 1);
  }
  ~ScopedEnv() {
    if (old_) ::setenv(name_, old_->c_str(), 1);
    else ::unsetenv(name_);
  }

private:
  const char* name_;
  std::optional<std::string> old_;
};

}  // namespace

// ---- request handler ---------------------------------------------------------

TEST(Service, HealthAndSchemaVersion) {
  const auto r = handle_request(context(), "GET", "/healthz");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body["status"], "ok");
  for (const auto& [method, path] : std::vector<std::pair<std::string, std::string>>{
           {"GET", "/healthz"}, {"GET", "/api/presets"}, {"GET", "/api/chain"}, {"GET", "/nope"}, {"PUT", "/api/presets"}})
    EXPECT_EQ(handle_request(context(), method, path).body["schema_version"], service::kSchemaVersion) << path;
  EXPECT_EQ(post("/api/synthesize", json::object()).body["schema_version"], service::kSchemaVersion);
}

TEST(Service, ListsSixPresets) {
  const auto r = handle_request(context(), "GET", "/api/presets?x=1");
  ASSERT_EQ(r.status, 200);
  const auto& p = r.body["presets"];
  ASSERT_EQ(p.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    const auto e = laban::kAllExpressions[i];
    EXPECT_EQ(p[i]["name"], laban::to_string(e));
    EXPECT_EQ(p[i]["effort"]["weight"], "Strong");
    EXPECT_EQ(p[i]["pause_count"], laban::pause_count(laban::preset(e)));
  }
}

TEST(Service, DescribesChainSceneAndPostures) {
  const auto r = handle_request(context(), "GET", "/api/chain");
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["chain"]["joints"].size(), 7u);
  EXPECT_EQ(r.body["wrist_joints"], json({5, 6}));
  EXPECT_TRUE(r.body["scene"].contains("line_b"));
  for (const char* form : {"Wall", "Ball", "Pin", "Screw"}) EXPECT_TRUE(r.body["postures"].contains(form)) << form;
}

TEST(Service, SynthesizesPreset) {
  const auto r = post("/api/synthesize", {{"preset", "Shy"}, {"svg", true}});
  ASSERT_EQ(r.status, 200) << r.text();
  const auto& b = r.body;
  EXPECT_EQ(b["features"]["reversal_count"], 0);
  EXPECT_EQ(b["classified"]["quality"], "None");
  EXPECT_EQ(b["classified"]["time"], "Sustained");
  EXPECT_EQ(b["trajectory"]["samples"].size(), 601u);
  EXPECT_EQ(b["phases"].size(), 601u);
  EXPECT_EQ(b["trajectory"]["meta"]["expression"], "Shy");
  EXPECT_EQ(b["svg"].get<std::string>().rfind("<svg", 0), 0u);
  const auto traj = synthesis::trajectory_from_json(b["trajectory"]);
  EXPECT_EQ(synthesis::check_trajectory(traj, context().chain), "");
}

TEST(Service, SynthesizesCustomSpecWithOverrides) {
  const auto r = post("/api/synthesize", {{"spec", {{"preset", "SpokeHesitant"}, {"retreat", {{"count_per_segment", 1}}}}},
                                         {"dt", 0.04},
                                         {"seed", 9},
                                         {"scene", {{"pick_b", 0.4}}}});
  ASSERT_EQ(r.status, 200) << r.text();
  EXPECT_EQ(r.body["features"]["reversal_count"], 6);
  EXPECT_EQ(r.body["trajectory"]["meta"]["dt"], 0.04);
  EXPECT_EQ(r.body["spec"]["retreat"]["jitter_seed"], 9);
  EXPECT_EQ(post("/api/synthesize", {{"spec", "Angry"}}).status, 200);
}

TEST(Service, ValidationErrorsNameTheField) {
  const auto r = post("/api/synthesize", {{"spec", {{"preset", "ArcHesitant"}, {"shape", {{"quality", "None"}}}}}});
  ASSERT_EQ(r.status, 400);
  EXPECT_EQ(r.body["error"], "invalid_request");
  EXPECT_EQ(r.body["issues"][0]["field"], "shape.mode");
  EXPECT_EQ(post("/api/synthesize", {{"preset", "Grumpy"}}).status, 400);
  EXPECT_EQ(post("/api/synthesize", {{"preset", "Sad"}, {"dt", -1}}).body["issues"][0]["field"], "dt");
  EXPECT_EQ(post("/api/synthesize", {{"preset", "Sad"}, {"seed", -3}}).body["issues"][0]["field"], "seed");
  EXPECT_EQ(post("/api/synthesize", {{"preset", "Sad"}, {"scene", {{"pick_a", 2}}}}).body["issues"][0]["field"],
            "scene");
  const auto bad = handle_request(context(), "POST", "/api/synthesize", "{not json");
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(bad.body["issues"][0]["field"], "body");
}

TEST(Service, StageFailuresAreReported) {
  const auto far = post("/api/synthesize", {{"preset", "Sad"}, {"scene", {{"line_b", {{2.0, 0, 0.5}, {2.2, 0, 0.5}}}}}});
  EXPECT_EQ(far.status, 422);
  EXPECT_EQ(far.body["stage"], "scene");
  const auto coarse = post("/api/synthesize", {{"preset", "SpokeHesitant"}, {"dt", 1.0}});
  EXPECT_EQ(coarse.status, 422);
  EXPECT_EQ(coarse.body["stage"], "timing");
}

TEST(Service, DeadlineGivesServiceUnavailable) {
  service::ServiceContext ctx;
  ctx.timeout = std::chrono::milliseconds(0);
  const auto r = handle_request(ctx, "POST", "/api/synthesize", R"({"preset": "Sad"})");
  EXPECT_EQ(r.status, 503);
  EXPECT_EQ(r.body["error"], "timeout");
}

TEST(Service, UnknownRoutesAndMethods) {
  EXPECT_EQ(handle_request(context(), "GET", "/api/unknown").status, 404);
  EXPECT_EQ(handle_request(context(), "POST", "/api/presets", "{}").status, 405);
  EXPECT_EQ(handle_request(context(), "GET", "/api/synthesize").status, 405);
}

TEST(Service, AnalyzesRawGroups) {
  const auto r = post("/api/analyze", {{"groups", {{{"name", "x"}, {"values", {1, 2}}}, {{"name", "y"}, {"values", {3, 4}}}}}});
  ASSERT_EQ(r.status, 200) << r.text();
  EXPECT_EQ(r.body["comparison"]["anova"]["F"], 8.0);
  EXPECT_DOUBLE_EQ(r.body["comparison"]["pairs"][0]["q"].get<double>(), 4.0);
  EXPECT_EQ(r.body["comparison"]["pairs"][0]["group_i"], "x");

  const auto flat = post("/api/analyze", {{"groups", {{{"values", {1, 1}}}, {{"values", {2, 2}}}}}});
  EXPECT_EQ(flat.status, 422);
  EXPECT_EQ(flat.body["stage"], "anova");
  EXPECT_EQ(post("/api/analyze", {{"groups", {{{"values", {1, 2}}}}}}).status, 400);
  EXPECT_EQ(post("/api/analyze", {{"groups", {{{"values", {1, "a"}}}}}}).body["issues"][0]["field"], "groups[0].values");
  EXPECT_EQ(post("/api/analyze", {{"groups", json::array()}, {"alpha", 2}}).body["issues"][0]["field"], "alpha");
}

TEST(Service, AnalyzesLabelFiles) {
  const auto root = testing_support::source_dir() / "samples";
  const json body = {{"labels_csv", testing_support::read_file(root / "labels.csv")},
                     {"lexicon_tsv", testing_support::read_file(root / "lexicon.tsv")},
                     {"alpha", 0.05}};
  const auto r = post("/api/analyze", body);
  ASSERT_EQ(r.status, 200) << r.text();
  EXPECT_EQ(r.body["report"]["records"], 36);
  EXPECT_EQ(r.body["report"]["scored"], 35);

  auto broken = body;
  broken["lexicon_tsv"] = "joy\t1.2\t0.5\t0.5\n";
  const auto e = post("/api/analyze", broken);
  EXPECT_EQ(e.status, 400);
  EXPECT_EQ(e.body["issues"][0]["field"], "lexicon_tsv");
  EXPECT_NE(e.body["message"].get<std::string>().find("line 1"), std::string::npos);
  broken = body;
  broken.erase("labels_csv");
  EXPECT_EQ(post("/api/analyze", broken).body["issues"][0]["field"], "labels_csv");
}

TEST(Service, StatelessAcrossRequestOrder) {
  const std::vector<json> bodies = {{{"preset", "Happy"}}, {{"preset", "ArcHesitant"}}, {{"preset", "Angry"}}};
  std::vector<std::string> forward, backward;
  for (const auto& b : bodies) forward.push_back(post("/api/synthesize", b).text());
  for (auto it = bodies.rbegin(); it != bodies.rend(); ++it) backward.push_back(post("/api/synthesize", *it).text());
  std::reverse(backward.begin(), backward.end());
  EXPECT_EQ(forward, backward);
}

TEST(Service, ConcurrentRequestsAgree) {
  const std::string expect = post("/api/synthesize", {{"preset", "SpokeHesitant"}}).text();
  std::vector<std::future<std::string>> jobs;
  for (int i = 0; i < 4; ++i)
    jobs.push_back(std::async(std::launch::async, [] { return post("/api/synthesize", {{"preset", "SpokeHesitant"}}).text(); }));
  for (auto& j : jobs) EXPECT_EQ(j.get(), expect);
}

// ---- live server -------------------------------------------------------------

TEST(Server, ServesApiOverHttp) {
  service::ServerOptions opts;
  opts.port = 0;
  opts.threads = 2;
  service::Server srv(service::ServiceContext{}, opts);
  const int port = srv.bind();
  ASSERT_GT(port, 0);
  std::thread loop([&] { srv.run(); });
  srv.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(30, 0);
  const auto presets = client.Get("/api/presets");
  ASSERT_TRUE(presets);
  EXPECT_EQ(presets->status, 200);
  EXPECT_EQ(presets->get_header_value("Access-Control-Allow-Origin"), "*");
  EXPECT_EQ(presets->get_header_value("Content-Type"), "application/json");
  EXPECT_EQ(json::parse(presets->body)["presets"].size(), 6u);

  const auto synth = client.Post("/api/synthesize", R"({"preset": "Angry"})", "application/json");
  ASSERT_TRUE(synth);
  EXPECT_EQ(synth->status, 200);
  EXPECT_EQ(json::parse(synth->body)["features"]["reversal_count"], 0);

  const auto bad = client.Post("/api/synthesize", "{", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);

  const auto preflight = client.Options("/api/synthesize");
  ASSERT_TRUE(preflight);
  EXPECT_EQ(preflight->status, 204);
  EXPECT_NE(preflight->get_header_value("Access-Control-Allow-Methods").find("POST"), std::string::npos);

  EXPECT_EQ(client.Get("/missing")->status, 404);
  srv.stop();
  loop.join();
}

TEST(Server, MountsUiDirectory) {
  testing_support::TempDir dir("ui");
  write(dir.file("index.html"), "<html>ui</html>");
  service::ServerOptions opts;
  opts.port = 0;
  opts.ui_dir = dir.path().string();
  service::Server srv(service::ServiceContext{}, opts);
  const int port = srv.bind();
  std::thread loop([&] { srv.run(); });
  srv.wait_until_ready();
  httplib::Client client("127.0.0.1", port);
  const auto page = client.Get("/index.html");
  ASSERT_TRUE(page);
  EXPECT_EQ(page->body, "<html>ui</html>");
  EXPECT_EQ(client.Get("/healthz")->status, 200);
  srv.stop();
  loop.join();

  opts.ui_dir = dir.file("missing");
  EXPECT_THROW(service::Server(service::ServiceContext{}, opts), InputError);
}

// ---- command line -------------------------------------------------------------

TEST(Cli, PresetsListsSix) {
  const auto r = run({"presets"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 6);
  EXPECT_NE(r.out.find("Happy: Time=Sudden"), std::string::npos);
  const auto j = run({"presets", "--json"});
  EXPECT_EQ(j.code, 0);
  EXPECT_EQ(json::parse(j.out).size(), 6u);
}

TEST(Cli, SynthWritesValidTrajectoryAndPlot) {
  testing_support::TempDir dir("cli_synth");
  const auto r = run({"--out-dir", dir.path().string(), "synth", "-e", "ArcHesitant", "-o", "arc.json", "--svg", "arc.svg"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto traj = synthesis::load_trajectory(dir.file("arc.json"));
  EXPECT_EQ(synthesis::check_trajectory(traj, kinematics::default_chain()), "");
  EXPECT_EQ(traj.meta.expression, "ArcHesitant");
  EXPECT_NE(testing_support::read_file(dir.file("arc.svg")).find("retreat"), std::string::npos);

  const auto f = run({"features", "-t", dir.file("arc.json"), "--json"});
  ASSERT_EQ(f.code, 0) << f.err;
  const auto j = json::parse(f.out);
  EXPECT_EQ(j["classified"]["quality"], "Retreating");
  EXPECT_EQ(j["classified"]["space"], "Indirect");
  EXPECT_NE(run({"features", "-t", dir.file("arc.json")}).out.find("Retreating"), std::string::npos);
}

TEST(Cli, SynthFromSpecFile) {
  testing_support::TempDir dir("cli_spec");
  const auto spec = (testing_support::source_dir() / "samples" / "arc_hesitant_light.json").string();
  const auto r = run({"synth", "-e", spec, "-o", dir.file("t.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto traj = synthesis::load_trajectory(dir.file("t.json"));
  const auto f = synthesis::measure_features(traj, synthesis::default_scene(), 2);
  EXPECT_GT(f.wrist_displacement_rad, 0.0);
  EXPECT_EQ(f.reversal_count, 3 * 2 * 3);
}

TEST(Cli, AnalyzeTwoGroupFixture) {
  testing_support::TempDir dir("cli_analyze");
  write_two_group_fixture(dir);
  const auto r = run({"analyze", "-l", dir.file("labels.csv"), "-x", dir.file("lexicon.tsv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  for (const char* dim : {"valence", "arousal", "dominance"}) {
    EXPECT_EQ(j["comparisons"][dim]["anova"]["F"], 8.0) << dim;
    EXPECT_EQ(j["comparisons"][dim]["pairs"][0]["q"], 4.0) << dim;
  }
  const auto to_file = run({"analyze", "-l", dir.file("labels.csv"), "-x", dir.file("lexicon.tsv"), "-o",
                            dir.file("report.json")});
  EXPECT_EQ(to_file.code, 0);
  EXPECT_EQ(json::parse(testing_support::read_file(dir.file("report.json"))), j);
}

TEST(Cli, ExitCodes) {
  testing_support::TempDir dir("cli_codes");
  write_two_group_fixture(dir);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"bogus"}).code, 1);
  EXPECT_EQ(run({"synth", "-e", "Grumpy", "-o", dir.file("x.json")}).code, 1);
  EXPECT_EQ(run({"synth", "-e", "Sad"}).code, 1);
  EXPECT_EQ(run({"--dt", "-1", "presets"}).code, 1);
  write(dir.file("bad_spec.json"), R"({"preset": "ArcHesitant", "shape": {"quality": "None"}})");
  const auto invalid = run({"synth", "-e", dir.file("bad_spec.json"), "-o", dir.file("x.json")});
  EXPECT_EQ(invalid.code, 1);
  EXPECT_NE(invalid.err.find("shape.mode"), std::string::npos);
  EXPECT_EQ(run({"analyze", "-l", dir.file("missing.csv"), "-x", dir.file("lexicon.tsv")}).code, 2);
  write(dir.file("bad.tsv"), "joy\t1.2\t0.5\t0.5\n");
  const auto bad_lex = run({"analyze", "-l", dir.file("labels.csv"), "-x", dir.file("bad.tsv")});
  EXPECT_EQ(bad_lex.code, 2);
  EXPECT_NE(bad_lex.err.find("line 1"), std::string::npos);
  EXPECT_EQ(run({"features", "-t", dir.file("missing.json")}).code, 2);
  EXPECT_EQ(run({"--dt", "1.0", "synth", "-e", "SpokeHesitant", "-o", dir.file("x.json")}).code, 2);
}

TEST(Cli, HelpForEverySubcommand) {
  const auto top = run({"--help"});
  EXPECT_EQ(top.code, 0);
  for (const char* sub : {"presets", "synth", "features", "analyze", "serve"}) {
    EXPECT_NE(top.out.find(sub), std::string::npos) << sub;
    const auto r = run({sub, "--help"});
    EXPECT_EQ(r.code, 0) << sub;
    EXPECT_NE(r.out.find("Usage"), std::string::npos) << sub;
  }
  EXPECT_NE(run({"synth", "--help"}).out.find("--expression"), std::string::npos);
}

TEST(Cli, ConfigFileAndPrecedence) {
  testing_support::TempDir dir("cli_config");
  write(dir.file("expressive.toml"), "dt = 0.05\n");
  const auto dt_of = [&](const std::string& file) { return synthesis::load_trajectory(file).dt; };

  ASSERT_EQ(run({"--config", dir.file("expressive.toml"), "synth", "-e", "Angry", "-o", dir.file("a.json")}).code, 0);
  EXPECT_EQ(dt_of(dir.file("a.json")), 0.05);
  ASSERT_EQ(run({"--config", dir.file("expressive.toml"), "--dt", "0.04", "synth", "-e", "Angry", "-o", dir.file("b.json")})
                .code,
            0);
  EXPECT_EQ(dt_of(dir.file("b.json")), 0.04);

  {
    ScopedEnv env(cli::kConfigDirEnv, dir.path().string());
    ASSERT_EQ(run({"synth", "-e", "Angry", "-o", dir.file("c.json")}).code, 0);
    EXPECT_EQ(dt_of(dir.file("c.json")), 0.05);
  }
  ASSERT_EQ(run({"synth", "-e", "Angry", "-o", dir.file("d.json")}).code, 0);
  EXPECT_EQ(dt_of(dir.file("d.json")), 0.02);

  const auto sample = run({"--config", (testing_support::source_dir() / "samples" / "expressive.toml").string(),
                           "synth", "-e", "Angry", "-o", dir.file("e.json")});
  EXPECT_EQ(sample.code, 0) << sample.err;
  EXPECT_NE(sample.err.find("[expressive]"), std::string::npos);
}

TEST(Cli, SynthIsDeterministic) {
  testing_support::TempDir dir("cli_det");
  ASSERT_EQ(run({"synth", "-e", "SpokeHesitant", "-o", dir.file("1.json")}).code, 0);
  ASSERT_EQ(run({"synth", "-e", "SpokeHesitant", "-o", dir.file("2.json")}).code, 0);
  EXPECT_EQ(testing_support::read_file(dir.file("1.json")), testing_support::read_file(dir.file("2.json")));
}
