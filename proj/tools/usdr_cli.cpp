#include "usdr/dataset.hpp"
#include "usdr/error.hpp"
#include "usdr/model_io.hpp"
#include "usdr/pipeline.hpp"
#include "usdr/svg.hpp"
#include "usdr/text.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Options shared by commands that build a run config.
struct RunOptions {
  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> methods;
  std::string data_path;
  std::string execution;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--config", o.config_path, "JSON run config");
  cmd->add_option("--preset", o.preset, "named base config");
  cmd->add_option("--seed", o.seed, "base seed (overrides the config)");
  cmd->add_option("--methods", o.methods, "subset of usdr,blind_all,blind_ensemble,clean")
      ->delimiter(',');
  cmd->add_option("--data", o.data_path, "input CSV (overrides data source)");
  cmd->add_option("--execution", o.execution, "parallel or serial")
      ->check(CLI::IsMember({"parallel", "serial"}));
}

json resolved_config(const RunOptions& o) {
  json doc = o.config_path.empty() ? json::object() : usdr::load_config_file(o.config_path);
  if (!o.execution.empty()) doc["execution"] = o.execution;
  usdr::ConfigOverrides ov;
  if (!o.preset.empty()) ov.preset = o.preset;
  ov.seed = o.seed;
  if (!o.methods.empty()) ov.methods = o.methods;
  if (o.config_path.empty() && o.preset.empty())
    throw usdr::Error(usdr::Errc::InvalidArgument, "one of --config or --preset is required");
  if (!o.data_path.empty() && !doc.contains("data")) doc["data"] = {{"csv", o.data_path}};
  json cfg = usdr::resolve_config(std::move(doc), ov);
  if (!o.data_path.empty()) {
    json data = cfg.value("data", json::object());
    data.erase("synth");
    data["csv"] = o.data_path;
    cfg["data"] = data;
  }
  return cfg;
}

void require_dir(const fs::path& file) {
  const fs::path parent = file.parent_path();
  if (!parent.empty() && !fs::is_directory(parent))
    throw usdr::Error(usdr::Errc::Io, "output directory does not exist: " + parent.string());
}

void ensure_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw usdr::Error(usdr::Errc::Io, "cannot create output directory " + dir.string());
}

void write_json(const fs::path& path, const json& doc) { usdr::write_file(path.string(), doc.dump(2) + "\n"); }

int cmd_generate(const RunOptions& o, const std::string& out) {
  const json cfg = resolved_config(o);
  if (!cfg.at("data").contains("synth"))
    throw usdr::Error(usdr::Errc::InvalidArgument, "generate needs a data.synth section");
  require_dir(out);
  const usdr::Dataset data = usdr::generate_dataset(cfg);
  const std::string csv = usdr::to_csv_string(data);
  usdr::write_file(out, csv);
  json manifest = {{"format", "usdr.data_manifest"},
                   {"version", 1},
                   {"synth", cfg.at("data").at("synth")},
                   {"seed", cfg.at("seed")},
                   {"rows", data.size()},
                   {"features", data.input_dim()},
                   {"csv_hash", usdr::to_hex(usdr::fnv1a64(csv))}};
  if (data.labels) {
    double pos = 0;
    for (int l : *data.labels) pos += l;
    manifest["label_mean"] = pos / static_cast<double>(data.size());
  }
  write_json(out + ".manifest.json", manifest);
  std::cout << "wrote " << out << " (" << data.size() << " rows)\n";
  return 0;
}

usdr::RefineResult refine_to(const json& cfg, const fs::path& dir, bool save_models) {
  ensure_out_dir(dir);
  usdr::RefineResult r = usdr::run_refinement(cfg);
  usdr::write_file((dir / "scores.csv").string(), usdr::scores_csv(r.scores));
  if (save_models) {
    json models = json::array();
    for (const auto& m : r.ensemble) models.push_back(usdr::to_json(m));
    write_json(dir / "models.json", models);
  }
  write_json(dir / "manifest.json", r.manifest);
  if (r.residuals && !r.standardization.ok())
    std::cerr << "warning: residual standardization check failed (max |mean| "
              << r.standardization.max_abs_mean << ", max |std-1| "
              << r.standardization.max_std_error << ")\n";
  return r;
}

void write_evaluation(const std::vector<usdr::ScoreSeries>& scores, const usdr::GroundTruth& truth,
                      const std::string& hash, const fs::path& dir, const std::string& plot) {
  const auto metrics = usdr::evaluate_scores(scores, truth);
  write_json(dir / "metrics.json", usdr::metrics_json(metrics, hash));
  for (const auto& m : metrics) {
    if (m.curve)
      usdr::write_file((dir / ("pr_" + std::string(usdr::method_name(m.method)) + ".csv")).string(),
                       usdr::pr_curve_csv(*m.curve));
    std::cout << usdr::method_name(m.method);
    if (m.ap) std::cout << " ap=" << *m.ap;
    if (m.rmse) std::cout << " rmse=" << *m.rmse;
    std::cout << '\n';
  }
  if (!plot.empty()) {
    std::optional<std::vector<double>> overlay;
    if (truth.health) {
      overlay = usdr::degradation_truth(*truth.health);
    } else if (truth.labels) {
      overlay.emplace(truth.labels->begin(), truth.labels->end());
    }
    require_dir(plot);
    usdr::write_file(plot, usdr::score_plot_svg(scores, overlay));
  }
}

// Truth rows beyond the refined length are dropped when the manifest says the
// series was trimmed.
usdr::GroundTruth trim_truth(usdr::GroundTruth t, std::size_t n, const json& manifest) {
  const auto input_rows = manifest.value("input_rows", std::size_t{0});
  auto trim = [&](auto& v) {
    if (v && v->size() == input_rows && input_rows > n) v->resize(n);
  };
  trim(t.labels);
  trim(t.health);
  return t;
}

int cmd_evaluate(const std::string& scores_path, const std::string& truth_path,
                 const std::string& out, const std::string& plot) {
  const std::string text = usdr::read_file(scores_path);
  const auto scores = usdr::parse_scores_csv(text);
  if (scores.empty()) throw usdr::Error(usdr::Errc::Parse, scores_path + ": no scores");
  json manifest = json::object();
  const fs::path sibling = fs::path(scores_path).parent_path() / "manifest.json";
  if (fs::exists(sibling)) manifest = json::parse(usdr::read_file(sibling.string()));
  const std::string hash = manifest.contains("config_hash")
                               ? manifest.at("config_hash").get<std::string>()
                               : usdr::to_hex(usdr::fnv1a64(text));
  const auto truth =
      trim_truth(usdr::load_ground_truth(truth_path), scores.front().values.size(), manifest);
  const fs::path dir = out.empty() ? fs::path(scores_path).parent_path() : fs::path(out);
  ensure_out_dir(dir.empty() ? fs::path(".") : dir);
  write_evaluation(scores, truth, hash, dir.empty() ? fs::path(".") : dir, plot);
  return 0;
}

int cmd_run(const RunOptions& o, const std::string& out, bool save_models) {
  const json cfg = resolved_config(o);
  const fs::path dir(out);
  ensure_out_dir(dir);
  if (cfg.at("data").contains("synth"))
    usdr::write_file((dir / "data.csv").string(), usdr::to_csv_string(usdr::generate_dataset(cfg)));
  const auto r = refine_to(cfg, dir, save_models);
  write_evaluation(r.scores, usdr::ground_truth_of(r.data), r.manifest.at("config_hash"), dir,
                   (dir / "scores.svg").string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised data refinement for contaminated time series"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "usdr 1.0");

  RunOptions gen_opts, ref_opts, run_opts;
  std::string gen_out, ref_out = "out", run_out = "out";
  std::string ev_scores, ev_truth, ev_out, ev_plot;
  bool ref_save = false, run_save = false, list_presets = false;

  auto* gen = app.add_subcommand("generate", "write a synthetic dataset CSV and its manifest");
  add_run_options(gen, gen_opts);
  gen->add_option("-o,--out", gen_out, "output CSV path")->required();

  auto* ref = app.add_subcommand("refine", "score every sample with the requested methods");
  add_run_options(ref, ref_opts);
  ref->add_option("-o,--out", ref_out, "output directory");
  ref->add_flag("--save-models", ref_save, "write fitted ensemble to models.json");

  auto* ev = app.add_subcommand("evaluate", "AP / RMSE of a scores file against ground truth");
  ev->add_option("--scores", ev_scores, "scores CSV")->required();
  ev->add_option("--truth", ev_truth, "CSV with label and/or health columns")->required();
  ev->add_option("-o,--out", ev_out, "output directory (default: beside the scores)");
  ev->add_option("--plot", ev_plot, "SVG plot path");

  auto* run = app.add_subcommand("run", "generate or load, refine, evaluate and plot");
  add_run_options(run, run_opts);
  run->add_option("-o,--out", run_out, "output directory");
  run->add_flag("--save-models", run_save, "write fitted ensemble to models.json");

  auto* presets = app.add_subcommand("presets", "list named configs");
  presets->add_flag("--json", list_presets, "print each preset document");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_generate(gen_opts, gen_out);
    if (*ref) {
      refine_to(resolved_config(ref_opts), ref_out, ref_save);
      std::cout << "wrote " << (fs::path(ref_out) / "scores.csv").string() << '\n';
      return 0;
    }
    if (*ev) return cmd_evaluate(ev_scores, ev_truth, ev_out, ev_plot);
    if (*run) return cmd_run(run_opts, run_out, run_save);
    if (*presets) {
      for (const auto& name : usdr::preset_names()) {
        if (list_presets)
          std::cout << name << ' ' << usdr::preset_document(name).dump() << '\n';
        else
          std::cout << name << "  " << usdr::preset_description(name) << '\n';
      }
      return 0;
    }
  } catch (const usdr::Error& e) {
    std::cerr << "error [" << usdr::errc_name(e.code()) << "]: " << e.what() << '\n';
    return e.exit_code();
  } catch (const json::exception& e) {
    std::cerr << "error [InvalidArgument]: " << e.what() << '\n';
    return static_cast<int>(usdr::ErrorKind::Config);
  }
  return 0;
}
