#pragma once

#include "usdr/dataset.hpp"
#include "usdr/eval.hpp"
#include "usdr/refine.hpp"
#include "usdr/synth.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace usdr {

// A run is described by one JSON document:
//
//   {
//     "preset":    "abrupt-single",            // optional base document
//     "seed":      7,
//     "data":      {"csv": "in.csv", "features": [...]}  |  {"synth": {...}},
//     "plan":      {"window": 200, "stride": 40}
//                | {"subsets": 20, "m_train": 4}
//                | {"subsets": 20, "window_fraction": 0.2},
//     "model":     {"type": "pca", "k": 5} | {"type": "autoencoder", ...},
//     "methods":   ["usdr", "blind_all", "blind_ensemble", "clean"],
//     "smoothing": 10,
//     "clean":     {"mask": "auto|labels|prefix", "prefix_fraction": 0.1,
//                   "mode": "ensemble|prefix"},
//     "execution": "parallel|serial"
//   }
//
// Keys in the user document override the preset (JSON merge patch), except
// "data", which replaces the preset's data section whole.
struct ConfigOverrides {
  std::optional<std::string> preset;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<std::string>> methods;
};

nlohmann::json parse_config_text(const std::string& text, const std::string& origin);
nlohmann::json load_config_file(const std::string& path);

// Applies preset and overrides; the result is self-contained.
nlohmann::json resolve_config(nlohmann::json doc, const ConfigOverrides& overrides = {});

std::string config_hash(const nlohmann::json& resolved);

AbruptConfig abrupt_config_from_json(const nlohmann::json& doc, std::uint64_t default_seed);
DegradationConfig degradation_config_from_json(const nlohmann::json& doc,
                                               std::uint64_t default_seed);
nlohmann::json to_json(const AbruptConfig& cfg);
nlohmann::json to_json(const DegradationConfig& cfg);

// Synthetic dataset described by the "data.synth" section.
Dataset generate_dataset(const nlohmann::json& resolved);

// Dataset named by the "data" section (CSV or synthetic).
Dataset load_run_data(const nlohmann::json& resolved, std::string* provenance_hash = nullptr);

// Plan over `n` samples; the series may need trimming to plan.n rows.
SubsetPlan resolve_plan(const nlohmann::json& plan_doc, std::size_t n);

struct RefineResult {
  Dataset data;  // trimmed to plan.n rows
  std::size_t input_rows = 0;
  SubsetPlan plan;
  std::vector<FittedModel> ensemble;
  std::optional<ResidualMatrix> residuals;
  std::vector<ScoreSeries> scores;
  std::vector<std::size_t> clean_subset_ids;
  StandardizationReport standardization;
  nlohmann::json manifest;
};

RefineResult run_refinement(const nlohmann::json& resolved);
RefineResult run_refinement(const nlohmann::json& resolved, const Dataset& data);

// `index,score,method`, one block per method in run order.
std::string scores_csv(const std::vector<ScoreSeries>& scores);
std::vector<ScoreSeries> parse_scores_csv(const std::string& text);

struct GroundTruth {
  std::optional<std::vector<int>> labels;
  std::optional<std::vector<double>> health;
};

GroundTruth ground_truth_of(const Dataset& data);
GroundTruth load_ground_truth(const std::string& path);

struct MethodMetrics {
  Method method;
  std::optional<double> ap;
  std::optional<double> rmse;
  std::size_t n = 0;
  std::optional<std::size_t> n_pos;
  std::optional<PrCurve> curve;
};

std::vector<MethodMetrics> evaluate_scores(const std::vector<ScoreSeries>& scores,
                                           const GroundTruth& truth);

nlohmann::json metrics_json(const std::vector<MethodMetrics>& metrics,
                            const std::string& config_hash);
std::string pr_curve_csv(const PrCurve& curve);

const char* preset_description(const std::string& name);
std::vector<std::string> preset_names();
nlohmann::json preset_document(const std::string& name);

}  // namespace usdr
