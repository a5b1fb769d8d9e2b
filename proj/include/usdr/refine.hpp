#pragma once

#include "usdr/dataset.hpp"
#include "usdr/models.hpp"
#include "usdr/subsetting.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace usdr {

enum class Method { Usdr, BlindAll, BlindEnsemble, Clean };

const char* method_name(Method m) noexcept;
Method parse_method(const std::string& name);
inline constexpr Method kAllMethods[] = {Method::Usdr, Method::BlindAll, Method::BlindEnsemble,
                                         Method::Clean};

// Serial is the reference path; Parallel distributes ensemble members and
// residual columns over OpenMP threads and must agree with it bit for bit.
enum class Execution { Serial, Parallel };

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

// r(i, j) = (raw residual of sample i under model j - mu_j) / sigma_j.
struct ResidualMatrix {
  Matrix r;               // N x M
  BoolMatrix in_training; // N x M, true iff sample i is in subset j
};

struct ScoreSeries {
  std::vector<double> values;
  Method method = Method::Usdr;
  std::size_t smoothing_window = 1;
  std::string provenance;
};

// Deterministic, decorrelated per-member seed.
std::uint64_t member_seed(std::uint64_t base_seed, std::size_t j) noexcept;

std::vector<FittedModel> train_ensemble(const Dataset& data, const SubsetPlan& plan,
                                        const ModelConfig& config, std::uint64_t base_seed,
                                        Execution exec = Execution::Parallel);

// Trains only the listed subsets, returned in the order given.
std::vector<FittedModel> train_members(const Dataset& data, const SubsetPlan& plan,
                                       const ModelConfig& config, std::uint64_t base_seed,
                                       const std::vector<std::size_t>& subset_ids,
                                       Execution exec = Execution::Parallel);

ResidualMatrix residual_matrix(const Dataset& data, const SubsetPlan& plan,
                               const std::vector<FittedModel>& ensemble,
                               Execution exec = Execution::Parallel);

// Mean over out-of-subset columns minus mean over in-subset columns.
std::vector<double> usdr_scores(const ResidualMatrix& rm, const SubsetPlan& plan);

// One model on every row; score is its raw residual.
std::vector<double> blind_all_scores(const Dataset& data, const ModelConfig& config,
                                     std::uint64_t seed = 0);

// Mean over all M columns, in- and out-of-subset alike.
std::vector<double> blind_ensemble_scores(const ResidualMatrix& rm);

// Mean over the listed columns only.
std::vector<double> column_mean_scores(const ResidualMatrix& rm,
                                       const std::vector<std::size_t>& columns);

enum class CleanMode { Ensemble, Prefix };

// Subsets lying entirely inside the mask.
std::vector<std::size_t> clean_subsets(const SubsetPlan& plan, const std::vector<bool>& mask);

std::vector<double> clean_scores(const Dataset& data, const SubsetPlan& plan,
                                 const ModelConfig& config, const std::vector<bool>& normal_mask,
                                 CleanMode mode, std::uint64_t base_seed,
                                 Execution exec = Execution::Parallel);

// Trailing moving mean over `smooth_window` samples, then min-max rescale
// to [0,1]. A constant series maps to all zeros.
ScoreSeries postprocess(const std::vector<double>& raw, std::size_t smooth_window,
                        Method method = Method::Usdr);

struct StandardizationReport {
  double max_abs_mean = 0.0;     // over columns, of the training-row mean
  double max_std_error = 0.0;    // over unclamped columns, |std - 1|
  std::size_t clamped_columns = 0;
  bool clamped_columns_zero = true;

  bool ok(double mean_tol = 1e-9, double std_tol = 1e-6) const {
    return max_abs_mean <= mean_tol && max_std_error <= std_tol && clamped_columns_zero;
  }
};

StandardizationReport check_standardization(const ResidualMatrix& rm,
                                            const std::vector<FittedModel>& ensemble);

}  // namespace usdr
