#include "usdr/model_io.hpp"

#include "usdr/error.hpp"

#include <string>

namespace usdr {

using nlohmann::json;

namespace {

json flat(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json flat_rows(const Matrix& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  return out;
}

Vector vector_from(const json& j, Eigen::Index expected, const char* what) {
  auto v = j.get<std::vector<double>>();
  if (static_cast<Eigen::Index>(v.size()) != expected)
    throw Error(Errc::Parse, std::string("model document: '") + what + "' has wrong length");
  return Eigen::Map<const Vector>(v.data(), expected);
}

Matrix matrix_from(const json& j, Eigen::Index rows, Eigen::Index cols, const char* what) {
  auto v = j.get<std::vector<double>>();
  if (static_cast<Eigen::Index>(v.size()) != rows * cols)
    throw Error(Errc::Parse, std::string("model document: '") + what + "' has wrong length");
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = v[static_cast<std::size_t>(r * cols + c)];
  return m;
}

const char* activation_name(Activation a) { return a == Activation::Relu ? "relu" : "linear"; }

Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::Relu;
  if (s == "linear") return Activation::Linear;
  throw Error(Errc::InvalidArgument, "unknown activation '" + s + "'");
}

}  // namespace

const char* reduction_name(ResidualReduction r) noexcept {
  return r == ResidualReduction::Mae ? "mae" : "rmse";
}

ResidualReduction parse_reduction(const std::string& name) {
  if (name == "mae") return ResidualReduction::Mae;
  if (name == "rmse") return ResidualReduction::Rmse;
  throw Error(Errc::InvalidArgument, "unknown residual reduction '" + name + "'");
}

json to_json(const FittedModel& model) {
  json doc;
  doc["format"] = "usdr.fitted_model";
  doc["version"] = kModelFormatVersion;
  doc["reduction"] = reduction_name(model.reduction);
  doc["mu"] = model.mu;
  doc["sigma"] = model.sigma;
  if (const auto* p = std::get_if<PcaModel>(&model.params)) {
    doc["kind"] = "pca";
    doc["input_dim"] = p->input_dim();
    doc["k"] = p->components.cols();
    doc["mean"] = flat(p->mean);
    doc["scale"] = flat(p->scale);
    doc["components"] = flat_rows(p->components);
  } else {
    const auto& a = std::get<AutoencoderModel>(model.params);
    doc["kind"] = "autoencoder";
    doc["input_dim"] = a.input_dim();
    doc["hidden_activation"] = activation_name(a.net.hidden_activation);
    doc["in_mean"] = flat(a.in_mean);
    doc["in_scale"] = flat(a.in_scale);
    doc["out_mean"] = flat(a.out_mean);
    doc["out_scale"] = flat(a.out_scale);
    json layers = json::array();
    for (const auto& l : a.net.layers)
      layers.push_back({{"in", l.weights.cols()},
                        {"out", l.weights.rows()},
                        {"weights", flat_rows(l.weights)},
                        {"bias", flat(l.bias)}});
    doc["layers"] = std::move(layers);
  }
  return doc;
}

FittedModel fitted_model_from_json(const json& doc) {
  try {
    if (doc.at("format") != "usdr.fitted_model")
      throw Error(Errc::Parse, "not a fitted model document");
    if (doc.at("version").get<int>() != kModelFormatVersion)
      throw Error(Errc::Parse, "unsupported model document version");
    FittedModel m;
    m.reduction = parse_reduction(doc.at("reduction").get<std::string>());
    m.mu = doc.at("mu").get<double>();
    m.sigma = doc.at("sigma").get<double>();
    const auto dim = doc.at("input_dim").get<Eigen::Index>();
    const auto kind = doc.at("kind").get<std::string>();
    if (kind == "pca") {
      PcaModel p;
      const auto k = doc.at("k").get<Eigen::Index>();
      p.mean = vector_from(doc.at("mean"), dim, "mean");
      p.scale = vector_from(doc.at("scale"), dim, "scale");
      p.components = matrix_from(doc.at("components"), dim, k, "components");
      m.params = std::move(p);
    } else if (kind == "autoencoder") {
      AutoencoderModel a;
      a.net.hidden_activation = parse_activation(doc.at("hidden_activation"));
      a.in_mean = vector_from(doc.at("in_mean"), dim, "in_mean");
      a.in_scale = vector_from(doc.at("in_scale"), dim, "in_scale");
      a.out_mean = vector_from(doc.at("out_mean"), dim, "out_mean");
      a.out_scale = vector_from(doc.at("out_scale"), dim, "out_scale");
      for (const auto& l : doc.at("layers")) {
        const auto in = l.at("in").get<Eigen::Index>();
        const auto out = l.at("out").get<Eigen::Index>();
        a.net.layers.push_back({matrix_from(l.at("weights"), out, in, "weights"),
                                vector_from(l.at("bias"), out, "bias")});
      }
      if (a.net.layers.empty()) throw Error(Errc::Parse, "autoencoder has no layers");
      m.params = std::move(a);
    } else {
      throw Error(Errc::Parse, "unknown model kind '" + kind + "'");
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(Errc::Parse, std::string("malformed model document: ") + e.what());
  }
}

json to_json(const ModelConfig& config) {
  json doc;
  doc["reduction"] = reduction_name(config.reduction);
  if (const auto* p = std::get_if<PcaConfig>(&config.variant)) {
    doc["type"] = "pca";
    doc["k"] = p->k;
    doc["standardize"] = p->standardize;
  } else {
    const auto& a = std::get<AutoencoderConfig>(config.variant);
    doc["type"] = "autoencoder";
    doc["layers"] = a.layer_dims;
    doc["epochs"] = a.epochs;
    doc["batch_size"] = a.batch_size;
    doc["learning_rate"] = a.learning_rate;
    doc["momentum"] = a.momentum;
    doc["seed"] = a.seed;
    doc["hidden_activation"] = activation_name(a.hidden_activation);
    doc["standardize"] = a.standardize;
  }
  return doc;
}

ModelConfig model_config_from_json(const json& doc, Eigen::Index input_dim) {
  ModelConfig config;
  try {
    config.reduction = parse_reduction(doc.value("reduction", std::string("mae")));
    const auto type = doc.value("type", std::string("pca"));
    if (type == "pca") {
      PcaConfig p;
      p.k = doc.value("k", p.k);
      p.standardize = doc.value("standardize", p.standardize);
      config.variant = p;
    } else if (type == "autoencoder") {
      AutoencoderConfig a;
      if (doc.contains("hidden")) {
        if (input_dim < 1)
          throw Error(Errc::InvalidArgument, "'hidden' widths need a known input width");
        a.layer_dims.push_back(input_dim);
        for (auto w : doc.at("hidden").get<std::vector<Eigen::Index>>()) a.layer_dims.push_back(w);
        a.layer_dims.push_back(input_dim);
      } else if (doc.at("layers").is_string()) {
        const auto name = doc.at("layers").get<std::string>();
        if (input_dim < 1)
          throw Error(Errc::InvalidArgument, "layer template needs a known input width");
        if (name == "abrupt")
          a.layer_dims = abrupt_autoencoder_layers(input_dim);
        else if (name == "degradation")
          a.layer_dims = degradation_autoencoder_layers(input_dim);
        else
          throw Error(Errc::InvalidArgument, "unknown layer template '" + name + "'");
      } else {
        a.layer_dims = doc.at("layers").get<std::vector<Eigen::Index>>();
      }
      a.epochs = doc.value("epochs", a.epochs);
      a.batch_size = doc.value("batch_size", a.batch_size);
      a.learning_rate = doc.value("learning_rate", a.learning_rate);
      a.momentum = doc.value("momentum", a.momentum);
      a.seed = doc.value("seed", a.seed);
      a.hidden_activation = parse_activation(doc.value("hidden_activation", std::string("relu")));
      a.standardize = doc.value("standardize", a.standardize);
      config.variant = a;
    } else {
      throw Error(Errc::InvalidArgument, "unknown model type '" + type + "'");
    }
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("invalid model config: ") + e.what());
  }
  return config;
}

}  // namespace usdr
