#include "usdr/error.hpp"
#include "usdr/pipeline.hpp"

#include <map>

namespace usdr {

using nlohmann::json;

namespace {

json segments(std::initializer_list<std::pair<const char*, int>> parts) {
  json out = json::array();
  for (const auto& [kind, len] : parts) out.push_back({kind, len});
  return out;
}

constexpr double kNoiseLow = 0.5;
constexpr double kNoiseMid = 1.0;
constexpr double kNoiseHigh = 2.0;

// Sliding window of 200 samples, each sample in 5 subsets.
json abrupt_document(json segs, double noise, const char* description) {
  return {
      {"description", description},
      {"seed", 0},
      {"data",
       {{"synth",
         {{"kind", "abrupt"},
          {"n_features", 40},
          {"segments", std::move(segs)},
          {"shift", 0.5},
          {"noise", noise},
          {"ar_coeff", 0.0},
          {"fault_noise_gain", 1.0}}}}},
      {"plan", {{"window", 200}, {"stride", 40}}},
      {"model", {{"type", "pca"}, {"k", 5}, {"standardize", true}}},
      {"methods", {"usdr", "blind_all", "blind_ensemble", "clean"}},
      {"smoothing", 10},
      {"clean", {{"mask", "labels"}, {"mode", "ensemble"}}},
  };
}

json degradation_document() {
  return {
      {"description", "slow exponential degradation after a 20% healthy plateau"},
      {"seed", 0},
      {"data",
       {{"synth",
         {{"kind", "degradation"},
          {"n_features", 19},
          {"n", 1000},
          {"knee", 0.2},
          {"effect", 80.0},
          {"shape", "exponential"},
          {"noise", kNoiseMid},
          {"ar_coeff", 0.0}}}}},
      {"plan", {{"subsets", 20}, {"window_fraction", 0.2}}},
      {"model", {{"type", "pca"}, {"k", 5}, {"standardize", true}}},
      {"methods", {"usdr", "blind_all", "blind_ensemble", "clean"}},
      {"smoothing", 1},
      {"clean", {{"mask", "prefix"}, {"prefix_fraction", 0.1}, {"mode", "prefix"}}},
  };
}

const std::map<std::string, json>& registry() {
  static const std::map<std::string, json> presets = [] {
    std::map<std::string, json> p;
    p["abrupt-single"] = abrupt_document(segments({{"normal", 500}, {"fault", 200}, {"normal", 300}}),
                                         kNoiseMid, "single fault period, 20% contamination");
    p["abrupt-triple"] = abrupt_document(
        segments({{"normal", 300}, {"fault", 70}, {"normal", 150}, {"fault", 70},
                  {"normal", 150}, {"fault", 70}, {"normal", 190}}),
        kNoiseMid, "three short fault periods, 21% contamination");
    p["degradation"] = degradation_document();

    json ae = p["abrupt-single"];
    ae["description"] = "single fault period, dense autoencoder";
    ae["model"] = {{"type", "autoencoder"},  {"hidden", {32, 16, 32}},
                   {"epochs", 40},           {"batch_size", 20},
                   {"learning_rate", 0.005}, {"momentum", 0.9}};
    p["abrupt-single-ae"] = ae;

    struct Machine {
      const char* name;
      int fault;
      const char* description;
    };
    const Machine machines[] = {
        {"miml-fan-like", 290, "single fault, 29% contamination"},
        {"miml-pump-like", 120, "single fault, 12% contamination"},
        {"miml-slider-like", 250, "single fault, 25% contamination"},
        {"miml-valve-like", 110, "single fault, 11% contamination"},
    };
    const std::pair<const char*, double> noise_levels[] = {
        {"", kNoiseMid}, {"-low-noise", kNoiseLow}, {"-high-noise", kNoiseHigh}};
    for (const auto& m : machines) {
      for (const auto& [suffix, noise] : noise_levels) {
        p[std::string(m.name) + suffix] = abrupt_document(
            segments({{"normal", 400}, {"fault", m.fault}, {"normal", 600 - m.fault}}), noise,
            m.description);
      }
    }
    return p;
  }();
  return presets;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, doc] : registry()) names.push_back(name);
  return names;
}

json preset_document(const std::string& name) {
  const auto& r = registry();
  auto it = r.find(name);
  if (it == r.end()) throw Error(Errc::InvalidArgument, "unknown preset '" + name + "'");
  return it->second;
}

const char* preset_description(const std::string& name) {
  const auto& r = registry();
  auto it = r.find(name);
  if (it == r.end()) return "";
  return it->second.at("description").get_ref<const std::string&>().c_str();
}

}  // namespace usdr
