#include "usdr/pca.hpp"

#include "usdr/error.hpp"

#include <cmath>
#include <string>

namespace usdr {

PcaModel fit_pca(const PcaConfig& config, const Matrix& x) {
  const auto n = x.rows();
  const auto dim = x.cols();
  if (n < 2) throw Error(Errc::InvalidArgument, "PCA needs at least two training rows");
  if (config.k < 1 || config.k > dim)
    throw Error(Errc::InvalidArgument, "PCA k=" + std::to_string(config.k) +
                                           " outside [1, " + std::to_string(dim) + "]");

  PcaModel model;
  model.mean = x.colwise().mean().transpose();
  Matrix z = x.rowwise() - model.mean.transpose();
  model.scale = Vector::Ones(dim);
  if (config.standardize) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      const double sd = std::sqrt(z.col(c).squaredNorm() / static_cast<double>(n - 1));
      model.scale(c) = sd < kScaleFloor ? kScaleFloor : sd;
    }
    z = z.array().rowwise() / model.scale.transpose().array();
  }

  const Matrix cov = (z.transpose() * z) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  if (eig.info() != Eigen::Success)
    throw Error(Errc::NonFinite, "covariance eigendecomposition failed");

  // eigenvalues ascend; take the last k columns in reverse
  model.components.resize(dim, config.k);
  for (Eigen::Index c = 0; c < config.k; ++c) {
    Vector v = eig.eigenvectors().col(dim - 1 - c);
    Eigen::Index pivot = 0;
    v.cwiseAbs().maxCoeff(&pivot);
    if (v(pivot) < 0) v = -v;
    model.components.col(c) = v;
  }
  return model;
}

Matrix PcaModel::reconstruct(const Matrix& x) const {
  if (x.cols() != input_dim())
    throw Error(Errc::DimensionMismatch, "PCA input has " + std::to_string(x.cols()) +
                                             " columns, model expects " +
                                             std::to_string(input_dim()));
  Matrix z = (x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
  Matrix proj = (z * components) * components.transpose();
  return (proj.array().rowwise() * scale.transpose().array()).matrix().rowwise() +
         mean.transpose();
}

}  // namespace usdr
