#include "usdr/models.hpp"

#include "usdr/error.hpp"

#include <cmath>
#include <string>

namespace usdr {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

Eigen::Index FittedModel::input_dim() const {
  return std::visit([](const auto& p) { return p.input_dim(); }, params);
}

FittedModel fit(const ModelConfig& config, const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows())
    throw Error(Errc::DimensionMismatch, "input and target row counts differ (" +
                                             std::to_string(x.rows()) + " vs " +
                                             std::to_string(y.rows()) + ")");
  if (x.rows() < 2) throw Error(Errc::InvalidArgument, "fit needs at least two rows");
  if (!x.allFinite() || !y.allFinite())
    throw Error(Errc::NonFinite, "training data contains non-finite values");

  FittedModel model;
  model.reduction = config.reduction;
  std::visit(overloaded{
                 [&](const PcaConfig& c) {
                   if (x.cols() != y.cols() || x != y)
                     throw Error(Errc::DimensionMismatch,
                                 "PCA is a reconstruction model: targets must equal inputs");
                   model.params = fit_pca(c, x);
                 },
                 [&](const AutoencoderConfig& c) {
                   if (x.cols() != y.cols() || x != y)
                     throw Error(Errc::DimensionMismatch,
                                 "autoencoder is a reconstruction model: targets must equal inputs");
                   model.params = fit_autoencoder(c, x, y);
                 },
             },
             config.variant);

  const Vector r = raw_residuals(y, predict(model, x), config.reduction);
  if (!r.allFinite()) throw Error(Errc::NonFinite, "non-finite training residuals");
  const auto stats = residual_stats(r);
  model.mu = stats.mu;
  model.sigma = stats.sigma;
  return model;
}

Matrix predict(const FittedModel& model, const Matrix& x) {
  return std::visit(overloaded{
                        [&](const PcaModel& p) { return p.reconstruct(x); },
                        [&](const AutoencoderModel& a) { return a.predict(x); },
                    },
                    model.params);
}

double raw_residual(std::span<const double> y, std::span<const double> y_hat,
                    ResidualReduction reduction) {
  if (y.size() != y_hat.size())
    throw Error(Errc::DimensionMismatch, "residual operands differ in length");
  if (y.empty()) return 0.0;
  double acc = 0.0;
  if (reduction == ResidualReduction::Mae) {
    for (std::size_t k = 0; k < y.size(); ++k) acc += std::abs(y[k] - y_hat[k]);
    return acc / static_cast<double>(y.size());
  }
  for (std::size_t k = 0; k < y.size(); ++k) acc += (y[k] - y_hat[k]) * (y[k] - y_hat[k]);
  return std::sqrt(acc / static_cast<double>(y.size()));
}

Vector raw_residuals(const Matrix& y, const Matrix& y_hat, ResidualReduction reduction) {
  if (y.rows() != y_hat.rows() || y.cols() != y_hat.cols())
    throw Error(Errc::DimensionMismatch, "prediction shape differs from targets");
  Vector out(y.rows());
  std::vector<double> a(static_cast<std::size_t>(y.cols())), b(a.size());
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    for (Eigen::Index k = 0; k < y.cols(); ++k) {
      a[k] = y(i, k);
      b[k] = y_hat(i, k);
    }
    out(i) = raw_residual(a, b, reduction);
  }
  return out;
}

ResidualStats residual_stats(const Vector& r) {
  const auto n = static_cast<double>(r.size());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) sum += r(i);
  const double mu = sum / n;
  double ss = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) ss += (r(i) - mu) * (r(i) - mu);
  const double sigma = std::sqrt(ss / n);
  return {mu, sigma < kSigmaFloor ? kSigmaFloor : sigma};
}

ModelConfig with_seed(const ModelConfig& config, std::uint64_t seed) {
  ModelConfig out = config;
  if (auto* ae = std::get_if<AutoencoderConfig>(&out.variant)) ae->seed = seed;
  return out;
}

std::string model_kind(const ModelConfig& config) {
  return std::holds_alternative<PcaConfig>(config.variant) ? "pca" : "autoencoder";
}

}  // namespace usdr
