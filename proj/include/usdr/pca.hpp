#pragma once

#include "usdr/dataset.hpp"

namespace usdr {

struct PcaConfig {
  Eigen::Index k = 5;
  // Scale each feature by its training std before projecting.
  bool standardize = true;
};

// Reconstruction through the top-k principal subspace of the (optionally
// standardized) training rows.
struct PcaModel {
  Vector mean;
  Vector scale;
  Matrix components;  // D x k, orthonormal columns, descending variance

  Eigen::Index input_dim() const noexcept { return mean.size(); }
  Matrix reconstruct(const Matrix& x) const;
};

inline constexpr double kScaleFloor = 1e-12;

PcaModel fit_pca(const PcaConfig& config, const Matrix& x);

}  // namespace usdr
