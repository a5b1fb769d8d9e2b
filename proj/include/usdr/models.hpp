#pragma once

#include "usdr/autoencoder.hpp"
#include "usdr/dataset.hpp"
#include "usdr/pca.hpp"

#include <span>
#include <string>
#include <variant>

namespace usdr {

// Per-sample scalar reduction of a multivariate residual.
enum class ResidualReduction { Mae, Rmse };

struct ModelConfig {
  std::variant<PcaConfig, AutoencoderConfig> variant = PcaConfig{};
  ResidualReduction reduction = ResidualReduction::Mae;
};

// Lower bound on sigma_j; constant residuals rescale to zero.
inline constexpr double kSigmaFloor = 1e-12;

struct FittedModel {
  std::variant<PcaModel, AutoencoderModel> params;
  ResidualReduction reduction = ResidualReduction::Mae;
  double mu = 0.0;     // mean raw residual on the training rows
  double sigma = 1.0;  // population std of raw residuals on the training rows

  Eigen::Index input_dim() const;
};

FittedModel fit(const ModelConfig& config, const Matrix& x, const Matrix& y);
Matrix predict(const FittedModel& model, const Matrix& x);

double raw_residual(std::span<const double> y, std::span<const double> y_hat,
                    ResidualReduction reduction = ResidualReduction::Mae);

// raw_residual for every row pair.
Vector raw_residuals(const Matrix& y, const Matrix& y_hat,
                     ResidualReduction reduction = ResidualReduction::Mae);

struct ResidualStats {
  double mu;
  double sigma;
};

// Ascending-index mean and population std, sigma floored at kSigmaFloor.
ResidualStats residual_stats(const Vector& residuals);

// Copy with the autoencoder seed replaced; PCA configs are returned as-is.
ModelConfig with_seed(const ModelConfig& config, std::uint64_t seed);

std::string model_kind(const ModelConfig& config);

}  // namespace usdr
