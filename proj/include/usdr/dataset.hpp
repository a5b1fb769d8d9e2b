#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace usdr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Time-ordered samples. Row i of `inputs`/`targets` is time step i.
// `labels` and `health` are evaluation-only ground truth.
struct Dataset {
  Matrix inputs;
  Matrix targets;
  std::optional<std::vector<int>> labels;
  std::optional<std::vector<double>> health;
  std::vector<std::string> feature_names;

  Eigen::Index size() const noexcept { return inputs.rows(); }
  Eigen::Index input_dim() const noexcept { return inputs.cols(); }
  Eigen::Index output_dim() const noexcept { return targets.cols(); }
};

// Which CSV columns play which role. Empty `features` selects every column
// that is not a reserved ground-truth column. `feature_range` is an
// alternative positional selection [first, last) over all columns.
struct ColumnSchema {
  std::vector<std::string> features;
  std::optional<std::pair<std::size_t, std::size_t>> feature_range;
  std::string label_column = "label";
  std::string health_column = "health";
};

// Throws usdr::Error when any Dataset invariant is violated.
void validate(const Dataset& data);

Dataset load_csv(const std::filesystem::path& path, const ColumnSchema& schema = {});

// Writes features (then label/health when present) with 17 significant digits.
void save_csv(const Dataset& data, const std::filesystem::path& path);
std::string to_csv_string(const Dataset& data);

Dataset as_reconstruction(Dataset data);

bool is_reconstruction(const Dataset& data) noexcept;

// Rows `indices` of `m`, in the given order.
Matrix gather_rows(const Matrix& m, const std::vector<std::size_t>& indices);

// First `n` rows; ground truth is trimmed alike.
Dataset head(const Dataset& data, Eigen::Index n);

}  // namespace usdr
