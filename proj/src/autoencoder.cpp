#include "usdr/autoencoder.hpp"

#include "usdr/error.hpp"
#include "usdr/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace usdr {

namespace {

Matrix activate(const Matrix& z, Activation act) {
  return act == Activation::Relu ? Matrix(z.cwiseMax(0.0)) : z;
}

// Derivative applied in place to `delta` given the pre-activation `z`.
void apply_derivative(Matrix& delta, const Matrix& z, Activation act) {
  if (act == Activation::Linear) return;
  delta = delta.cwiseProduct((z.array() > 0.0).cast<double>().matrix());
}

Matrix affine(const Matrix& a, const DenseLayer& layer) {
  return (a * layer.weights.transpose()).rowwise() + layer.bias.transpose();
}

void column_stats(const Matrix& m, bool standardize, Vector& mean, Vector& scale) {
  const auto n = m.rows();
  if (!standardize) {
    mean = Vector::Zero(m.cols());
    scale = Vector::Ones(m.cols());
    return;
  }
  mean = m.colwise().mean().transpose();
  scale.resize(m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const double ss = (m.col(c).array() - mean(c)).square().sum();
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    scale(c) = sd < kScaleFloor ? kScaleFloor : sd;
  }
}

Matrix standardize_rows(const Matrix& m, const Vector& mean, const Vector& scale) {
  return (m.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

}  // namespace

std::size_t DenseNetwork::parameter_count() const {
  std::size_t total = 0;
  for (const auto& l : layers) total += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  return total;
}

Matrix DenseNetwork::forward(const Matrix& x) const {
  if (x.cols() != input_dim())
    throw Error(Errc::DimensionMismatch, "network input has " + std::to_string(x.cols()) +
                                             " columns, expected " +
                                             std::to_string(input_dim()));
  Matrix a = x;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Matrix z = affine(a, layers[l]);
    a = l + 1 < layers.size() ? activate(z, hidden_activation) : z;
  }
  return a;
}

std::vector<double> DenseNetwork::flatten() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const auto& l : layers) {
    flat.insert(flat.end(), l.weights.data(), l.weights.data() + l.weights.size());
    flat.insert(flat.end(), l.bias.data(), l.bias.data() + l.bias.size());
  }
  return flat;
}

void DenseNetwork::assign(const std::vector<double>& flat) {
  if (flat.size() != parameter_count())
    throw Error(Errc::DimensionMismatch, "parameter vector has wrong length");
  std::size_t pos = 0;
  for (auto& l : layers) {
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), l.weights.size(), l.weights.data());
    pos += static_cast<std::size_t>(l.weights.size());
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), l.bias.size(), l.bias.data());
    pos += static_cast<std::size_t>(l.bias.size());
  }
}

std::vector<double> NetworkGradients::flatten() const {
  std::vector<double> flat;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    flat.insert(flat.end(), weights[l].data(), weights[l].data() + weights[l].size());
    flat.insert(flat.end(), bias[l].data(), bias[l].data() + bias[l].size());
  }
  return flat;
}

double mse_loss(const DenseNetwork& net, const Matrix& x, const Matrix& y) {
  const Matrix out = net.forward(x);
  if (out.rows() != y.rows() || out.cols() != y.cols())
    throw Error(Errc::DimensionMismatch, "target shape differs from network output");
  return (out - y).squaredNorm() / static_cast<double>(y.rows() * y.cols());
}

double mse_loss_gradients(const DenseNetwork& net, const Matrix& x, const Matrix& y,
                          NetworkGradients& grads) {
  const std::size_t depth = net.layers.size();
  std::vector<Matrix> acts(depth + 1);  // acts[0] = input, acts[l+1] = output of layer l
  std::vector<Matrix> pre(depth);
  acts[0] = x;
  for (std::size_t l = 0; l < depth; ++l) {
    pre[l] = affine(acts[l], net.layers[l]);
    acts[l + 1] = l + 1 < depth ? activate(pre[l], net.hidden_activation) : pre[l];
  }
  const Matrix& out = acts[depth];
  if (out.rows() != y.rows() || out.cols() != y.cols())
    throw Error(Errc::DimensionMismatch, "target shape differs from network output");

  const double denom = static_cast<double>(y.rows() * y.cols());
  const double loss = (out - y).squaredNorm() / denom;

  grads.weights.resize(depth);
  grads.bias.resize(depth);
  Matrix delta = (2.0 / denom) * (out - y);
  for (std::size_t l = depth; l-- > 0;) {
    grads.weights[l] = delta.transpose() * acts[l];
    grads.bias[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      delta = delta * net.layers[l].weights;
      apply_derivative(delta, pre[l - 1], net.hidden_activation);
    }
  }
  return loss;
}

DenseNetwork init_network(const std::vector<Eigen::Index>& dims, Activation hidden,
                          std::uint64_t seed) {
  DenseNetwork net = zero_network(dims, hidden);
  std::mt19937_64 rng(seed);
  for (auto& l : net.layers) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(l.weights.cols() + l.weights.rows()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index i = 0; i < l.weights.size(); ++i) l.weights.data()[i] = dist(rng);
  }
  return net;
}

DenseNetwork zero_network(const std::vector<Eigen::Index>& dims, Activation hidden) {
  if (dims.size() < 2) throw Error(Errc::InvalidArgument, "network needs at least two widths");
  DenseNetwork net;
  net.hidden_activation = hidden;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    if (dims[l] < 1 || dims[l + 1] < 1)
      throw Error(Errc::InvalidArgument, "layer widths must be positive");
    net.layers.push_back({Matrix::Zero(dims[l + 1], dims[l]), Vector::Zero(dims[l + 1])});
  }
  return net;
}

void validate(const AutoencoderConfig& config, Eigen::Index input_dim) {
  const auto& dims = config.layer_dims;
  if (dims.size() < 3)
    throw Error(Errc::InvalidArgument, "autoencoder needs at least three layer widths");
  if (dims.front() != input_dim || dims.back() != input_dim)
    throw Error(Errc::DimensionMismatch,
                "autoencoder first/last widths must equal the input width " +
                    std::to_string(input_dim));
  for (auto w : dims)
    if (w < 1) throw Error(Errc::InvalidArgument, "layer widths must be positive");
  if (!(config.learning_rate > 0.0))
    throw Error(Errc::InvalidArgument, "learning_rate must be positive");
  if (config.epochs < 1) throw Error(Errc::InvalidArgument, "epochs must be at least 1");
  if (config.batch_size < 1) throw Error(Errc::InvalidArgument, "batch_size must be at least 1");
  if (!(config.momentum >= 0.0 && config.momentum < 1.0))
    throw Error(Errc::InvalidArgument, "momentum must lie in [0,1)");
}

Matrix AutoencoderModel::predict(const Matrix& x) const {
  if (x.cols() != input_dim())
    throw Error(Errc::DimensionMismatch, "autoencoder input has " + std::to_string(x.cols()) +
                                             " columns, model expects " +
                                             std::to_string(input_dim()));
  const Matrix out = net.forward(standardize_rows(x, in_mean, in_scale));
  return (out.array().rowwise() * out_scale.transpose().array()).matrix().rowwise() +
         out_mean.transpose();
}

AutoencoderModel fit_autoencoder(const AutoencoderConfig& config, const Matrix& x,
                                 const Matrix& y, TrainingTrace* trace) {
  validate(config, x.cols());
  if (x.rows() != y.rows())
    throw Error(Errc::DimensionMismatch, "input and target row counts differ");
  if (y.cols() != config.layer_dims.back())
    throw Error(Errc::DimensionMismatch, "target width differs from autoencoder output");

  AutoencoderModel model;
  column_stats(x, config.standardize, model.in_mean, model.in_scale);
  column_stats(y, config.standardize, model.out_mean, model.out_scale);
  const Matrix xs = standardize_rows(x, model.in_mean, model.in_scale);
  const Matrix ys = standardize_rows(y, model.out_mean, model.out_scale);

  model.net = init_network(config.layer_dims, config.hidden_activation, config.seed);
  const std::size_t n = static_cast<std::size_t>(x.rows());
  const std::size_t batch = std::min(config.batch_size, n);

  std::vector<Matrix> vel_w;
  std::vector<Vector> vel_b;
  for (const auto& l : model.net.layers) {
    vel_w.push_back(Matrix::Zero(l.weights.rows(), l.weights.cols()));
    vel_b.push_back(Vector::Zero(l.bias.size()));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // shuffling uses a stream separate from initialization
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);

  if (trace) trace->loss.push_back(mse_loss(model.net, xs, ys));
  NetworkGradients grads;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t batch_no = 0;
    for (std::size_t start = 0; start < n; start += batch, ++batch_no) {
      const std::size_t stop = std::min(start + batch, n);
      std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(start),
                                    order.begin() + static_cast<std::ptrdiff_t>(stop));
      const double loss =
          mse_loss_gradients(model.net, gather_rows(xs, rows), gather_rows(ys, rows), grads);
      if (!std::isfinite(loss))
        throw Error(Errc::NonFinite, "non-finite training loss at epoch " +
                                         std::to_string(epoch) + ", batch " +
                                         std::to_string(batch_no));
      for (std::size_t l = 0; l < model.net.layers.size(); ++l) {
        vel_w[l] = config.momentum * vel_w[l] - config.learning_rate * grads.weights[l];
        vel_b[l] = config.momentum * vel_b[l] - config.learning_rate * grads.bias[l];
        model.net.layers[l].weights += vel_w[l];
        model.net.layers[l].bias += vel_b[l];
      }
    }
    if (trace) trace->loss.push_back(mse_loss(model.net, xs, ys));
  }
  for (const auto& l : model.net.layers)
    if (!l.weights.allFinite() || !l.bias.allFinite())
      throw Error(Errc::NonFinite, "non-finite autoencoder parameters after training");
  return model;
}

double gradient_check(const DenseNetwork& net, const Matrix& x, const Matrix& y, double step) {
  NetworkGradients grads;
  mse_loss_gradients(net, x, y, grads);
  const std::vector<double> analytic = grads.flatten();

  DenseNetwork probe = net;
  std::vector<double> params = net.flatten();
  double worst = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    const double saved = params[p];
    params[p] = saved + step;
    probe.assign(params);
    const double up = mse_loss(probe, x, y);
    params[p] = saved - step;
    probe.assign(params);
    const double down = mse_loss(probe, x, y);
    params[p] = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double scale = std::max({std::abs(analytic[p]), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(analytic[p] - numeric) / scale);
  }
  return worst;
}

double gradient_check(const AutoencoderConfig& config, const Matrix& x, double step) {
  validate(config, x.cols());
  const DenseNetwork net = init_network(config.layer_dims, config.hidden_activation, config.seed);
  return gradient_check(net, x, x, step);
}

std::vector<Eigen::Index> abrupt_autoencoder_layers(Eigen::Index d) {
  // 7 widths around an 80-wide latent; 236944 parameters when d = 640.
  return {d, 112, 240, 80, 240, 112, d};
}

std::vector<Eigen::Index> degradation_autoencoder_layers(Eigen::Index d) {
  // 5 widths around a 20-wide latent; 6908 parameters when d = 28.
  return {d, 70, 20, 70, d};
}

}  // namespace usdr
