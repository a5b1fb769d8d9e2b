#include "usdr/error.hpp"
#include "usdr/pipeline.hpp"
#include "usdr/svg.hpp"
#include "usdr/text.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace fs = std::filesystem;
using namespace usdr;
using nlohmann::json;

namespace {

json preset(const std::string& name) {
  return resolve_config(json::object(), {name, std::nullopt, std::nullopt});
}

Errc error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return Errc::InvalidArgument;
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("usdr_pipeline_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(USDR_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void expect_standardized(const RefineResult& r) {
  ASSERT_TRUE(r.residuals);
  EXPECT_LE(r.standardization.max_abs_mean, 1e-9);
  EXPECT_LE(r.standardization.max_std_error, 1e-6);
  EXPECT_TRUE(r.standardization.clamped_columns_zero);
}

}  // namespace

TEST(Config, PresetMergeAndOverrides) {
  json doc = {{"preset", "abrupt-single"}, {"smoothing", 3}, {"plan", {{"stride", 20}}}};
  const auto cfg = resolve_config(doc, {std::nullopt, 99, std::vector<std::string>{"usdr"}});
  EXPECT_EQ(cfg.at("smoothing"), 3);
  EXPECT_EQ(cfg.at("plan").at("window"), 200);
  EXPECT_EQ(cfg.at("plan").at("stride"), 20);
  EXPECT_EQ(cfg.at("seed"), 99);
  EXPECT_EQ(cfg.at("methods"), json({"usdr"}));
  EXPECT_EQ(config_hash(cfg), config_hash(cfg));
  EXPECT_NE(config_hash(cfg), config_hash(preset("abrupt-single")));
}

TEST(Config, Errors) {
  EXPECT_EQ(error_of([] { parse_config_text("{\"a\": }", "cfg.json"); }), Errc::InvalidArgument);
  try {
    parse_config_text("{\n\"a\": 1,\n}", "cfg.json");
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line"), std::string::npos) << e.what();
  }
  EXPECT_EQ(error_of([] { resolve_config(json::object(), {"nope", std::nullopt, std::nullopt}); }),
            Errc::InvalidArgument);
  EXPECT_EQ(error_of([] {
              resolve_config(json::object(),
                             {"abrupt-single", std::nullopt, std::vector<std::string>{"x"}});
            }),
            Errc::InvalidArgument);
  EXPECT_EQ(error_of([] {
              resolve_config(json{{"preset", "abrupt-single"}, {"methods", json::array()}});
            }),
            Errc::InvalidArgument);
}

TEST(Config, PlanResolution) {
  const auto p = resolve_plan({{"window", 200}, {"stride", 40}}, 1013);
  EXPECT_EQ(p.n, 1000u);
  EXPECT_EQ(p.m, 25u);
  const auto q = resolve_plan({{"subsets", 20}, {"window_fraction", 0.2}}, 1013);
  EXPECT_EQ(q.n, 1000u);
  EXPECT_EQ(q.m_train, 4u);
  EXPECT_EQ(q.w, 200u);
  EXPECT_EQ(error_of([] { resolve_plan({{"window", 30}, {"stride", 40}}, 1000); }),
            Errc::InvalidArgument);
  EXPECT_EQ(error_of([] { resolve_plan({{"window", 200}, {"stride", 40}, {"trim", false}}, 1013); }),
            Errc::NonDivisible);
}

TEST(Refine, AllMethodsInUnitRange) {
  const auto r = run_refinement(preset("abrupt-single"));
  expect_standardized(r);
  ASSERT_EQ(r.scores.size(), 4u);
  for (const auto& s : r.scores) {
    ASSERT_EQ(s.values.size(), 1000u);
    EXPECT_EQ(*std::min_element(s.values.begin(), s.values.end()), 0.0);
    EXPECT_EQ(*std::max_element(s.values.begin(), s.values.end()), 1.0);
    EXPECT_EQ(s.provenance, r.manifest.at("config_hash"));
  }
  EXPECT_EQ(r.manifest.at("members").size(), 25u);
  EXPECT_TRUE(r.manifest.at("standardization").at("ok").get<bool>());
}

TEST(Refine, UsdrDiffersFromBlindEnsemble) {
  const auto r = run_refinement(preset("abrupt-single"));
  expect_standardized(r);
  double diff = 0.0;
  for (std::size_t i = 0; i < 1000; ++i)
    diff = std::max(diff, std::abs(r.scores[0].values[i] - r.scores[2].values[i]));
  EXPECT_GT(diff, 0.1);
}

TEST(Refine, CleanWithoutLabelsOrPrefix) {
  auto cfg = preset("abrupt-single");
  auto data = generate_dataset(cfg);
  data.labels.reset();
  cfg["clean"] = {{"mask", "auto"}, {"mode", "ensemble"}};
  EXPECT_EQ(error_of([&] { run_refinement(cfg, data); }), Errc::NoCleanSpec);
  cfg["methods"] = {"usdr"};
  EXPECT_NO_THROW(run_refinement(cfg, data));
}

TEST(Refine, TrimsToPlanLength) {
  auto cfg = preset("degradation");
  cfg["data"]["synth"]["n"] = 1013;
  const auto r = run_refinement(cfg);
  expect_standardized(r);
  EXPECT_EQ(r.input_rows, 1013u);
  EXPECT_EQ(r.data.size(), 1000);
  EXPECT_EQ(r.data.health->size(), 1000u);
  EXPECT_EQ(r.manifest.at("plan").at("n"), 1000);
}

TEST(Refine, AutoencoderPreset) {
  const auto r = run_refinement(preset("abrupt-single-ae"));
  expect_standardized(r);
  const auto m = evaluate_scores(r.scores, ground_truth_of(r.data));
  EXPECT_GT(*m[0].ap, *m[1].ap);
}

TEST(Refine, SerialMatchesParallel) {
  auto cfg = preset("abrupt-triple");
  cfg["execution"] = "serial";
  const auto s = run_refinement(cfg);
  cfg["execution"] = "parallel";
  const auto p = run_refinement(cfg);
  expect_standardized(s);
  for (std::size_t k = 0; k < s.scores.size(); ++k) EXPECT_EQ(s.scores[k].values, p.scores[k].values);
}

TEST(ScoresCsv, RoundTrip) {
  const auto r = run_refinement(preset("abrupt-triple"));
  const auto back = parse_scores_csv(scores_csv(r.scores));
  ASSERT_EQ(back.size(), r.scores.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    EXPECT_EQ(back[k].method, r.scores[k].method);
    EXPECT_EQ(back[k].values, r.scores[k].values);
  }
  EXPECT_EQ(error_of([] { parse_scores_csv("index,score,method\n0,0.5,usdr\n2,0.1,usdr\n"); }),
            Errc::Parse);
}

TEST(Evaluate, PerfectFixtures) {
  ScoreSeries s;
  s.values = {0.0, 0.2, 0.9, 1.0};
  GroundTruth t;
  t.labels = std::vector<int>{0, 0, 1, 1};
  auto m = evaluate_scores({s}, t);
  EXPECT_EQ(*m[0].ap, 1.0);
  EXPECT_EQ(*m[0].n_pos, 2u);
  EXPECT_FALSE(m[0].rmse);
  const auto doc = metrics_json(m, "abc");
  EXPECT_EQ(doc[0].at("ap"), 1.0);
  EXPECT_EQ(doc[0].at("config_hash"), "abc");
  EXPECT_FALSE(doc[0].contains("rmse"));

  GroundTruth h;
  h.health = std::vector<double>{1.0, 0.8, 0.1, 0.0};
  ScoreSeries g;
  g.values = degradation_truth(*h.health);
  EXPECT_EQ(*evaluate_scores({g}, h)[0].rmse, 0.0);
  EXPECT_EQ(error_of([&] { evaluate_scores({s}, GroundTruth{}); }), Errc::NoGroundTruth);
}

TEST(Evaluate, LoadGroundTruthColumns) {
  const auto dir = temp_dir("truth");
  std::ofstream(dir / "t.csv") << "x0,label\n1.5,0\n2.5,1\n";
  const auto t = load_ground_truth((dir / "t.csv").string());
  EXPECT_EQ(*t.labels, (std::vector<int>{0, 1}));
  EXPECT_FALSE(t.health);
  std::ofstream(dir / "n.csv") << "x0,x1\n1,2\n";
  EXPECT_EQ(error_of([&] { load_ground_truth((dir / "n.csv").string()); }), Errc::NoGroundTruth);
}

TEST(Svg, OnePanelPerMethod) {
  const auto r = run_refinement(preset("abrupt-triple"));
  std::vector<double> truth(r.data.labels->begin(), r.data.labels->end());
  const auto svg = score_plot_svg(r.scores, truth, "a<b");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  std::size_t lines = 0;
  for (auto p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1))
    ++lines;
  EXPECT_EQ(lines, 8u);
  EXPECT_NE(svg.find("a&lt;b"), std::string::npos);
}

TEST(Cli, GenerateIsByteDeterministic) {
  const auto dir = temp_dir("gen");
  const auto a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
  ASSERT_EQ(cli("generate --preset miml-fan-like --seed 7 -o " + a), 0);
  ASSERT_EQ(cli("generate --preset miml-fan-like --seed 7 -o " + b), 0);
  EXPECT_EQ(read_file(a), read_file(b));
  EXPECT_TRUE(fs::exists(a + ".manifest.json"));
  const auto manifest = json::parse(read_file(a + ".manifest.json"));
  EXPECT_NEAR(manifest.at("label_mean").get<double>(), 0.29, 1e-12);
  const auto d = load_csv(a);
  EXPECT_EQ(d.size(), 1000);
}

TEST(Cli, ExitCodes) {
  const auto dir = temp_dir("exit");
  EXPECT_NE(cli("generate --preset miml-fan-like -o " + (dir / "missing" / "x.csv").string()), 0);
  EXPECT_EQ(cli("generate --preset nope -o " + (dir / "x.csv").string()), 1);

  std::ofstream(dir / "bad.json") << "{\"preset\": \"abrupt-single\", \"plan\": {\"window\": 210, "
                                     "\"stride\": 40}}";
  EXPECT_EQ(cli("refine --config " + (dir / "bad.json").string() + " -o " + (dir / "r").string()), 1);

  std::ofstream(dir / "nolabel.csv") << "a,b\n1,2\n3,4\n5,6\n7,8\n";
  std::ofstream(dir / "cfg.json") << "{\"plan\": {\"window\": 2, \"stride\": 1}, \"model\": "
                                     "{\"type\": \"pca\", \"k\": 1}, \"methods\": [\"clean\"]}";
  EXPECT_EQ(cli("refine --config " + (dir / "cfg.json").string() + " --data " +
                (dir / "nolabel.csv").string() + " -o " + (dir / "r").string()),
            1);

  std::ofstream(dir / "scores.csv") << "index,score,method\n0,0.1,usdr\n1,0.9,usdr\n";
  EXPECT_EQ(cli("evaluate --scores " + (dir / "scores.csv").string() + " --truth " +
                (dir / "nolabel.csv").string()),
            2);

  std::ofstream(dir / "ragged.csv") << "a,b\n1,2\n3\n";
  EXPECT_EQ(cli("refine --preset abrupt-single --data " + (dir / "ragged.csv").string() + " -o " +
                (dir / "r").string()),
            2);

  std::ofstream(dir / "ae.json")
      << "{\"preset\": \"abrupt-single\", \"methods\": [\"blind_all\"], \"model\": {\"type\": "
         "\"autoencoder\", \"hidden\": [8], \"learning_rate\": 1e9, \"momentum\": 0, "
         "\"epochs\": 5}}";
  EXPECT_EQ(cli("refine --config " + (dir / "ae.json").string() + " -o " + (dir / "r").string()), 3);
}

TEST(Cli, RefineEvaluateRoundTrip) {
  const auto dir = temp_dir("flow");
  const auto data = (dir / "data.csv").string();
  ASSERT_EQ(cli("generate --preset abrupt-triple -o " + data), 0);
  std::ofstream(dir / "cfg.json") << "{\"preset\": \"abrupt-triple\", \"data\": {\"csv\": \"" << data
                                  << "\"}}";
  ASSERT_EQ(cli("refine --config " + (dir / "cfg.json").string() + " -o " + (dir / "out").string()),
            0);
  ASSERT_EQ(cli("evaluate --scores " + (dir / "out" / "scores.csv").string() + " --truth " + data +
                " --plot " + (dir / "out" / "plot.svg").string()),
            0);
  const auto metrics = json::parse(read_file((dir / "out" / "metrics.json").string()));
  ASSERT_EQ(metrics.size(), 4u);
  const auto manifest = json::parse(read_file((dir / "out" / "manifest.json").string()));
  EXPECT_EQ(metrics[0].at("config_hash"), manifest.at("config_hash"));
  EXPECT_TRUE(fs::exists(dir / "out" / "pr_usdr.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "plot.svg"));

  // the same numbers as an in-process run over the same CSV
  auto cfg = resolve_config(json::parse(read_file((dir / "cfg.json").string())));
  const auto r = run_refinement(cfg);
  const auto m = evaluate_scores(r.scores, ground_truth_of(r.data));
  EXPECT_EQ(metrics[0].at("ap").get<double>(), *m[0].ap);
}

// Golden values recorded from the pump-like fixture (12% contamination).
// Clean training outranks USDR on the other presets.
TEST(Cli, EvaluateOrderingGolden) {
  const auto dir = temp_dir("golden");
  ASSERT_EQ(cli("run --preset miml-pump-like -o " + dir.string()), 0);
  std::map<std::string, double> ap;
  for (const auto& row : json::parse(read_file((dir / "metrics.json").string())))
    ap[row.at("method")] = row.at("ap");
  EXPECT_NEAR(ap["usdr"], 0.939432, 1e-6);
  EXPECT_NEAR(ap["clean"], 0.925595, 1e-6);
  EXPECT_NEAR(ap["blind_ensemble"], 0.669947, 1e-6);
  EXPECT_NEAR(ap["blind_all"], 0.0903832, 1e-6);
  EXPECT_GE(ap["usdr"], ap["clean"]);
  EXPECT_GT(ap["clean"], ap["blind_ensemble"]);
  EXPECT_GT(ap["clean"], ap["blind_all"]);
}
