#pragma once

#include "usdr/dataset.hpp"

#include <cstdint>
#include <vector>

namespace usdr {

enum class Activation { Relu, Linear };

struct AutoencoderConfig {
  // input -> ... -> latent -> ... -> output; first and last equal D.
  std::vector<Eigen::Index> layer_dims;
  std::size_t epochs = 100;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  std::uint64_t seed = 0;
  Activation hidden_activation = Activation::Relu;
  bool standardize = true;
};

// Dense layer mapping row vectors: out = in * weights^T + bias^T.
struct DenseLayer {
  Matrix weights;  // out x in
  Vector bias;     // out
};

// Dense network with a linear output layer; operates on already
// standardized rows.
struct DenseNetwork {
  std::vector<DenseLayer> layers;
  Activation hidden_activation = Activation::Relu;

  Eigen::Index input_dim() const { return layers.front().weights.cols(); }
  Eigen::Index output_dim() const { return layers.back().weights.rows(); }
  std::size_t parameter_count() const;

  Matrix forward(const Matrix& x) const;

  // Flat parameter view in layer order: weights (column-major), then bias.
  std::vector<double> flatten() const;
  void assign(const std::vector<double>& flat);
};

struct NetworkGradients {
  std::vector<Matrix> weights;
  std::vector<Vector> bias;

  std::vector<double> flatten() const;
};

// Mean over rows of ||y - f(x)||^2 / D_out.
double mse_loss(const DenseNetwork& net, const Matrix& x, const Matrix& y);

// Same loss, with analytic gradients by backpropagation.
double mse_loss_gradients(const DenseNetwork& net, const Matrix& x, const Matrix& y,
                          NetworkGradients& grads);

// Uniform +-sqrt(6/(fan_in+fan_out)) weights, zero biases.
DenseNetwork init_network(const std::vector<Eigen::Index>& layer_dims, Activation hidden,
                          std::uint64_t seed);

DenseNetwork zero_network(const std::vector<Eigen::Index>& layer_dims, Activation hidden);

struct AutoencoderModel {
  DenseNetwork net;
  Vector in_mean, in_scale;
  Vector out_mean, out_scale;

  Eigen::Index input_dim() const noexcept { return in_mean.size(); }
  Matrix predict(const Matrix& x) const;
};

struct TrainingTrace {
  // Full-data loss before training, then after every epoch.
  std::vector<double> loss;
};

AutoencoderModel fit_autoencoder(const AutoencoderConfig& config, const Matrix& x,
                                 const Matrix& y, TrainingTrace* trace = nullptr);

void validate(const AutoencoderConfig& config, Eigen::Index input_dim);

// Max over parameters of |analytic - central difference| / max(|a|, |fd|, 1e-6).
double gradient_check(const DenseNetwork& net, const Matrix& x, const Matrix& y,
                      double step = 1e-5);
double gradient_check(const AutoencoderConfig& config, const Matrix& x, double step = 1e-5);

// Layer templates for the two experiment geometries.
std::vector<Eigen::Index> abrupt_autoencoder_layers(Eigen::Index input_dim);
std::vector<Eigen::Index> degradation_autoencoder_layers(Eigen::Index input_dim);

}  // namespace usdr
