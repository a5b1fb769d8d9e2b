#include "usdr/pipeline.hpp"

#include "usdr/error.hpp"
#include "usdr/model_io.hpp"
#include "usdr/text.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace usdr {

using nlohmann::json;

namespace {

template <class T>
T get_or(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key) || doc.at(key).is_null()) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("config key '") + key + "': " + e.what());
  }
}

const json& require(const json& doc, const char* key, const char* where) {
  if (!doc.is_object() || !doc.contains(key))
    throw Error(Errc::InvalidArgument, std::string(where) + ": missing required key '" + key + "'");
  return doc.at(key);
}

SegmentKind parse_segment_kind(const std::string& s) {
  if (s == "normal") return SegmentKind::Normal;
  if (s == "fault") return SegmentKind::Fault;
  throw Error(Errc::InvalidArgument, "segment kind must be 'normal' or 'fault', got '" + s + "'");
}

DegradationShape parse_shape(const std::string& s) {
  if (s == "linear") return DegradationShape::Linear;
  if (s == "exponential") return DegradationShape::Exponential;
  throw Error(Errc::InvalidArgument, "shape must be 'linear' or 'exponential', got '" + s + "'");
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

std::vector<bool> resolve_clean_mask(const json& clean, const Dataset& data) {
  const auto mask_kind = get_or<std::string>(clean, "mask", "auto");
  const auto n = static_cast<std::size_t>(data.size());
  const bool has_prefix = clean.contains("prefix_fraction");
  auto from_labels = [&] {
    std::vector<bool> mask(n);
    for (std::size_t i = 0; i < n; ++i) mask[i] = (*data.labels)[i] == 0;
    return mask;
  };
  auto from_prefix = [&] {
    const double f = clean.at("prefix_fraction").get<double>();
    if (!(f > 0.0 && f <= 1.0))
      throw Error(Errc::InvalidArgument, "clean.prefix_fraction must lie in (0,1]");
    const auto len = static_cast<std::size_t>(std::llround(f * static_cast<double>(n)));
    std::vector<bool> mask(n, false);
    std::fill_n(mask.begin(), std::min(len, n), true);
    return mask;
  };
  if (mask_kind == "labels") {
    if (!data.labels) throw Error(Errc::NoCleanSpec, "clean mask 'labels' needs a label column");
    return from_labels();
  }
  if (mask_kind == "prefix") {
    if (!has_prefix) throw Error(Errc::NoCleanSpec, "clean mask 'prefix' needs prefix_fraction");
    return from_prefix();
  }
  if (mask_kind == "auto") {
    if (data.labels) return from_labels();
    if (has_prefix) return from_prefix();
    throw Error(Errc::NoCleanSpec,
                "clean training requested but the data has no labels and no prefix_fraction is set");
  }
  throw Error(Errc::InvalidArgument, "clean.mask must be auto, labels or prefix");
}

CleanMode parse_clean_mode(const std::string& s) {
  if (s == "ensemble") return CleanMode::Ensemble;
  if (s == "prefix") return CleanMode::Prefix;
  throw Error(Errc::InvalidArgument, "clean.mode must be 'ensemble' or 'prefix'");
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ' && c != '\t') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::Parse, where + ": expected a number, got '" + s + "'");
  }
}

}  // namespace

json parse_config_text(const std::string& text, const std::string& origin) {
  try {
    json doc = json::parse(text);
    if (!doc.is_object())
      throw Error(Errc::InvalidArgument, origin + ": config must be a JSON object");
    return doc;
  } catch (const json::parse_error& e) {
    // nlohmann reports "at line L, column C"
    throw Error(Errc::InvalidArgument, origin + ": " + e.what());
  }
}

json load_config_file(const std::string& path) { return parse_config_text(read_file(path), path); }

json resolve_config(json doc, const ConfigOverrides& overrides) {
  if (!doc.is_object()) doc = json::object();
  std::optional<std::string> preset = overrides.preset;
  if (!preset && doc.contains("preset")) preset = doc.at("preset").get<std::string>();
  if (preset) {
    json base = preset_document(*preset);
    doc.erase("preset");
    // a data source is replaced whole, never mixed with the preset's
    if (doc.contains("data")) base.erase("data");
    base.merge_patch(doc);
    doc = std::move(base);
    doc["preset"] = *preset;
  }
  if (overrides.seed) doc["seed"] = *overrides.seed;
  if (overrides.methods) doc["methods"] = *overrides.methods;

  if (!doc.contains("seed")) doc["seed"] = 0;
  if (!doc.contains("methods")) doc["methods"] = {"usdr", "blind_all", "blind_ensemble", "clean"};
  if (!doc.contains("smoothing")) doc["smoothing"] = 10;
  if (!doc.contains("model")) doc["model"] = {{"type", "pca"}, {"k", 5}};
  if (!doc.contains("clean")) doc["clean"] = {{"mask", "auto"}, {"mode", "ensemble"}};
  if (!doc.contains("execution")) doc["execution"] = "parallel";

  require(doc, "data", "config");
  const auto& methods = doc.at("methods");
  if (!methods.is_array() || methods.empty())
    throw Error(Errc::InvalidArgument, "config: 'methods' must list at least one method");
  for (const auto& m : methods) parse_method(m.get<std::string>());
  if (get_or<long long>(doc, "smoothing", 1) < 1)
    throw Error(Errc::InvalidArgument, "config: 'smoothing' must be >= 1");
  const auto exec = doc.at("execution").get<std::string>();
  if (exec != "parallel" && exec != "serial")
    throw Error(Errc::InvalidArgument, "config: 'execution' must be parallel or serial");
  return doc;
}

std::string config_hash(const json& resolved) {
  json copy = resolved;
  copy.erase("out");
  return to_hex(fnv1a64(copy.dump()));
}

AbruptConfig abrupt_config_from_json(const json& doc, std::uint64_t default_seed) {
  AbruptConfig c;
  try {
    c.n_features = get_or<std::size_t>(doc, "n_features", c.n_features);
    c.shift = get_or<double>(doc, "shift", c.shift);
    c.noise = get_or<double>(doc, "noise", c.noise);
    c.ar_coeff = get_or<double>(doc, "ar_coeff", c.ar_coeff);
    c.fault_noise_gain = get_or<double>(doc, "fault_noise_gain", c.fault_noise_gain);
    c.seed = get_or<std::uint64_t>(doc, "seed", default_seed);
    for (const auto& s : require(doc, "segments", "data.synth")) {
      if (!s.is_array() || s.size() != 2)
        throw Error(Errc::InvalidArgument, "each segment must be [kind, length]");
      c.segments.push_back({parse_segment_kind(s[0].get<std::string>()), s[1].get<std::size_t>()});
    }
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("data.synth: ") + e.what());
  }
  validate(c);
  return c;
}

DegradationConfig degradation_config_from_json(const json& doc, std::uint64_t default_seed) {
  DegradationConfig c;
  c.n_features = get_or<std::size_t>(doc, "n_features", c.n_features);
  c.n = get_or<std::size_t>(doc, "n", c.n);
  c.knee = get_or<double>(doc, "knee", c.knee);
  c.effect = get_or<double>(doc, "effect", c.effect);
  c.shape = parse_shape(get_or<std::string>(doc, "shape", "exponential"));
  c.noise = get_or<double>(doc, "noise", c.noise);
  c.ar_coeff = get_or<double>(doc, "ar_coeff", c.ar_coeff);
  c.seed = get_or<std::uint64_t>(doc, "seed", default_seed);
  validate(c);
  return c;
}

json to_json(const AbruptConfig& c) {
  json segs = json::array();
  for (const auto& s : c.segments)
    segs.push_back({s.kind == SegmentKind::Fault ? "fault" : "normal", s.length});
  return {{"kind", "abrupt"},   {"n_features", c.n_features},
          {"segments", segs},   {"shift", c.shift},
          {"noise", c.noise},   {"ar_coeff", c.ar_coeff},
          {"fault_noise_gain", c.fault_noise_gain}, {"seed", c.seed}};
}

json to_json(const DegradationConfig& c) {
  return {{"kind", "degradation"},
          {"n_features", c.n_features},
          {"n", c.n},
          {"knee", c.knee},
          {"effect", c.effect},
          {"shape", c.shape == DegradationShape::Linear ? "linear" : "exponential"},
          {"noise", c.noise},
          {"ar_coeff", c.ar_coeff},
          {"seed", c.seed}};
}

Dataset generate_dataset(const json& resolved) {
  const auto& data = require(resolved, "data", "config");
  const auto& synth = require(data, "synth", "data");
  const auto seed = get_or<std::uint64_t>(resolved, "seed", 0);
  const auto kind = get_or<std::string>(synth, "kind", "");
  if (kind == "abrupt") return gen_abrupt(abrupt_config_from_json(synth, seed));
  if (kind == "degradation") return gen_degradation(degradation_config_from_json(synth, seed));
  throw Error(Errc::InvalidArgument, "data.synth.kind must be 'abrupt' or 'degradation'");
}

Dataset load_run_data(const json& resolved, std::string* provenance_hash) {
  const auto& data = require(resolved, "data", "config");
  Dataset d;
  if (data.contains("csv")) {
    ColumnSchema schema;
    schema.features = get_or<std::vector<std::string>>(data, "features", {});
    if (data.contains("feature_range")) {
      auto r = data.at("feature_range").get<std::vector<std::size_t>>();
      if (r.size() != 2) throw Error(Errc::InvalidArgument, "data.feature_range must be [first, last)");
      schema.feature_range = std::make_pair(r[0], r[1]);
    }
    schema.label_column = get_or<std::string>(data, "label_column", schema.label_column);
    schema.health_column = get_or<std::string>(data, "health_column", schema.health_column);
    const auto path = data.at("csv").get<std::string>();
    d = load_csv(path, schema);
    if (provenance_hash) *provenance_hash = to_hex(fnv1a64(read_file(path)));
  } else if (data.contains("synth")) {
    d = generate_dataset(resolved);
    if (provenance_hash) *provenance_hash = to_hex(fnv1a64(to_csv_string(d)));
  } else {
    throw Error(Errc::InvalidArgument, "data: expected 'csv' or 'synth'");
  }
  return as_reconstruction(std::move(d));
}

SubsetPlan resolve_plan(const json& plan, std::size_t n) {
  if (!plan.is_object()) throw Error(Errc::InvalidArgument, "config: 'plan' must be an object");
  if (plan.contains("window") && plan.contains("stride")) {
    const auto w = plan.at("window").get<std::size_t>();
    const auto d = plan.at("stride").get<std::size_t>();
    if (d == 0) throw Error(Errc::InvalidArgument, "plan.stride must be positive");
    if (plan.value("trim", true)) return build_plan(n - n % d, w, d);
    return build_plan(n, w, d);
  }
  if (plan.contains("subsets")) {
    const auto m = plan.at("subsets").get<std::size_t>();
    std::size_t m_train = 0;
    if (plan.contains("m_train")) {
      m_train = plan.at("m_train").get<std::size_t>();
    } else if (plan.contains("window_fraction")) {
      const double f = plan.at("window_fraction").get<double>();
      if (!(f > 0.0 && f < 1.0))
        throw Error(Errc::InvalidArgument, "plan.window_fraction must lie in (0,1)");
      m_train = static_cast<std::size_t>(std::llround(f * static_cast<double>(m)));
    } else {
      throw Error(Errc::InvalidArgument, "plan: 'subsets' needs 'm_train' or 'window_fraction'");
    }
    return build_plan_from_counts(n, m, m_train);
  }
  throw Error(Errc::InvalidArgument,
              "plan: expected {window, stride} or {subsets, m_train | window_fraction}");
}

RefineResult run_refinement(const json& resolved) {
  std::string hash;
  Dataset data = load_run_data(resolved, &hash);
  RefineResult r = run_refinement(resolved, data);
  r.manifest["input_hash"] = hash;
  return r;
}

RefineResult run_refinement(const json& resolved, const Dataset& input) {
  const auto t0 = std::chrono::steady_clock::now();
  RefineResult result;
  result.input_rows = static_cast<std::size_t>(input.size());
  result.plan = resolve_plan(require(resolved, "plan", "config"), result.input_rows);
  result.data = static_cast<std::size_t>(input.size()) == result.plan.n
                    ? input
                    : head(input, static_cast<Eigen::Index>(result.plan.n));
  validate(result.data);
  const Dataset& data = result.data;

  const ModelConfig model = model_config_from_json(resolved.at("model"), data.input_dim());
  const auto seed = get_or<std::uint64_t>(resolved, "seed", 0);
  const auto smoothing = get_or<std::size_t>(resolved, "smoothing", 10);
  const Execution exec =
      get_or<std::string>(resolved, "execution", "parallel") == "serial" ? Execution::Serial
                                                                         : Execution::Parallel;
  std::vector<Method> methods;
  for (const auto& m : resolved.at("methods")) methods.push_back(parse_method(m.get<std::string>()));

  const json clean = get_or<json>(resolved, "clean", json::object());
  const CleanMode clean_mode = parse_clean_mode(get_or<std::string>(clean, "mode", "ensemble"));
  std::vector<bool> clean_mask;
  if (std::find(methods.begin(), methods.end(), Method::Clean) != methods.end())
    clean_mask = resolve_clean_mask(clean, data);

  const bool needs_ensemble =
      std::any_of(methods.begin(), methods.end(), [&](Method m) {
        return m == Method::Usdr || m == Method::BlindEnsemble ||
               (m == Method::Clean && clean_mode == CleanMode::Ensemble);
      });

  json timing = json::object();
  if (needs_ensemble) {
    auto t = std::chrono::steady_clock::now();
    result.ensemble = train_ensemble(data, result.plan, model, seed, exec);
    timing["train_ensemble"] = elapsed_ms(t);
    t = std::chrono::steady_clock::now();
    result.residuals = residual_matrix(data, result.plan, result.ensemble, exec);
    timing["residual_matrix"] = elapsed_ms(t);
    result.standardization = check_standardization(*result.residuals, result.ensemble);
  }

  const std::string hash = config_hash(resolved);
  for (Method m : methods) {
    const auto t = std::chrono::steady_clock::now();
    std::vector<double> raw;
    switch (m) {
      case Method::Usdr:
        raw = usdr_scores(*result.residuals, result.plan);
        break;
      case Method::BlindEnsemble:
        raw = blind_ensemble_scores(*result.residuals);
        break;
      case Method::BlindAll:
        raw = blind_all_scores(data, model, member_seed(seed, result.plan.m + 1));
        break;
      case Method::Clean:
        if (clean_mode == CleanMode::Ensemble) {
          result.clean_subset_ids = clean_subsets(result.plan, clean_mask);
          if (result.clean_subset_ids.empty())
            throw Error(Errc::NoCleanSubset, "no subset lies entirely inside the clean mask");
          // members trained on D_j are the same models clean training would fit
          raw = column_mean_scores(*result.residuals, result.clean_subset_ids);
        } else {
          raw = clean_scores(data, result.plan, model, clean_mask, CleanMode::Prefix, seed, exec);
        }
        break;
    }
    ScoreSeries s = postprocess(raw, smoothing, m);
    s.provenance = hash;
    result.scores.push_back(std::move(s));
    timing[std::string("score_") + method_name(m)] = elapsed_ms(t);
  }
  timing["total"] = elapsed_ms(t0);

  json members = json::array();
  for (std::size_t j = 0; j < result.ensemble.size(); ++j)
    members.push_back({{"subset", j},
                       {"start", j * result.plan.d},
                       {"seed", member_seed(seed, j)},
                       {"mu", result.ensemble[j].mu},
                       {"sigma", result.ensemble[j].sigma}});

  json& man = result.manifest;
  man["format"] = "usdr.run_manifest";
  man["version"] = 1;
  man["config"] = resolved;
  man["config_hash"] = hash;
  man["model"] = to_json(model);
  man["input_rows"] = result.input_rows;
  man["plan"] = {{"n", result.plan.n},
                 {"w", result.plan.w},
                 {"d", result.plan.d},
                 {"m", result.plan.m},
                 {"m_train", result.plan.m_train}};
  man["members"] = std::move(members);
  if (!result.clean_subset_ids.empty()) man["clean_subsets"] = result.clean_subset_ids;
  if (result.residuals) {
    const auto& rep = result.standardization;
    man["standardization"] = {{"max_abs_mean", rep.max_abs_mean},
                              {"max_std_error", rep.max_std_error},
                              {"clamped_columns", rep.clamped_columns},
                              {"ok", rep.ok()}};
  }
  man["degradation_truth"] = "g = 1 - h, with h rescaled to [0,1]";
  man["timing_ms"] = std::move(timing);
  return result;
}

std::string scores_csv(const std::vector<ScoreSeries>& scores) {
  std::string out = "index,score,method\n";
  for (const auto& s : scores)
    for (std::size_t i = 0; i < s.values.size(); ++i)
      out += std::to_string(i) + ',' + format_real(s.values[i]) + ',' + method_name(s.method) + '\n';
  return out;
}

std::vector<ScoreSeries> parse_scores_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw Error(Errc::Parse, "scores file is empty");
  const auto header = split_commas(lines[0]);
  auto col = [&](const char* name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw Error(Errc::Parse, std::string("scores file lacks a '") + name + "' column");
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto ci = col("index"), cs = col("score"), cm = col("method");
  std::vector<ScoreSeries> out;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const auto f = split_commas(lines[ln]);
    const std::string where = "scores row " + std::to_string(ln + 1);
    if (f.size() != header.size()) throw Error(Errc::RaggedRow, where + " has the wrong field count");
    const Method m = parse_method(f[cm]);
    auto it = std::find_if(out.begin(), out.end(), [&](const ScoreSeries& s) { return s.method == m; });
    if (it == out.end()) {
      out.push_back({});
      out.back().method = m;
      it = out.end() - 1;
    }
    const double idx = parse_number(f[ci], where);
    if (idx != static_cast<double>(it->values.size()))
      throw Error(Errc::Parse, where + ": indices must be consecutive from 0 per method");
    it->values.push_back(parse_number(f[cs], where));
  }
  return out;
}

GroundTruth ground_truth_of(const Dataset& data) { return {data.labels, data.health}; }

GroundTruth load_ground_truth(const std::string& path) {
  const auto lines = split_lines(read_file(path));
  if (lines.empty()) throw Error(Errc::Parse, path + ": missing header row");
  const auto header = split_commas(lines[0]);
  auto find = [&](const char* name) -> std::optional<std::size_t> {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto lc = find("label"), hc = find("health");
  if (!lc && !hc)
    throw Error(Errc::NoGroundTruth, path + ": neither a 'label' nor a 'health' column is present");
  GroundTruth t;
  if (lc) t.labels.emplace();
  if (hc) t.health.emplace();
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const auto f = split_commas(lines[ln]);
    const std::string where = path + ": row " + std::to_string(ln + 1);
    if (f.size() != header.size()) throw Error(Errc::RaggedRow, where + " has the wrong field count");
    if (lc) {
      const double v = parse_number(f[*lc], where);
      if (v != 0.0 && v != 1.0) throw Error(Errc::InvalidLabel, where + ": label must be 0 or 1");
      t.labels->push_back(static_cast<int>(v));
    }
    if (hc) {
      const double v = parse_number(f[*hc], where);
      if (!(v >= 0.0 && v <= 1.0)) throw Error(Errc::InvalidHealth, where + ": health outside [0,1]");
      t.health->push_back(v);
    }
  }
  return t;
}

std::vector<MethodMetrics> evaluate_scores(const std::vector<ScoreSeries>& scores,
                                           const GroundTruth& truth) {
  if (!truth.labels && !truth.health)
    throw Error(Errc::NoGroundTruth, "evaluation needs labels or a health index");
  std::optional<std::vector<double>> g;
  if (truth.health) g = degradation_truth(*truth.health);
  std::vector<MethodMetrics> out;
  for (const auto& s : scores) {
    MethodMetrics m;
    m.method = s.method;
    m.n = s.values.size();
    if (truth.labels) {
      if (truth.labels->size() != s.values.size())
        throw Error(Errc::DimensionMismatch, std::string(method_name(s.method)) +
                                                 ": score and label lengths differ");
      m.n_pos = static_cast<std::size_t>(std::count(truth.labels->begin(), truth.labels->end(), 1));
      m.curve = pr_curve(s, *truth.labels);
      m.ap = m.curve->ap;
    }
    if (g) {
      if (g->size() != s.values.size())
        throw Error(Errc::DimensionMismatch, std::string(method_name(s.method)) +
                                                 ": score and health lengths differ");
      m.rmse = rmse(s, *g);
    }
    out.push_back(std::move(m));
  }
  return out;
}

json metrics_json(const std::vector<MethodMetrics>& metrics, const std::string& hash) {
  json out = json::array();
  for (const auto& m : metrics) {
    json row = {{"method", method_name(m.method)},
                {"n", m.n},
                {"n_pos", m.n_pos.value_or(0)},
                {"config_hash", hash}};
    if (m.ap) row["ap"] = *m.ap;
    if (m.rmse) row["rmse"] = *m.rmse;
    out.push_back(std::move(row));
  }
  return out;
}

std::string pr_curve_csv(const PrCurve& curve) {
  std::string out = "threshold,precision,recall\n";
  for (const auto& p : curve.points)
    out += format_real(p.threshold) + ',' + format_real(p.precision) + ',' + format_real(p.recall) + '\n';
  return out;
}

}  // namespace usdr
