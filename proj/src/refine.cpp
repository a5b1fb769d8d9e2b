#include "usdr/refine.hpp"

#include "usdr/error.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

namespace usdr {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void require_plan_matches(const Dataset& data, const SubsetPlan& plan) {
  if (static_cast<std::size_t>(data.size()) != plan.n)
    throw Error(Errc::DimensionMismatch, "plan covers " + std::to_string(plan.n) +
                                             " samples, dataset has " +
                                             std::to_string(data.size()));
}

// Runs body(k) for k in [0, count), in parallel when asked. The first
// exception (lowest k) is rethrown after the loop.
template <class Body>
void for_each_index(std::size_t count, Execution exec, Body&& body) {
  std::vector<std::exception_ptr> errors(count);
  const auto n = static_cast<long long>(count);
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long long k = 0; k < n; ++k) {
      try {
        body(static_cast<std::size_t>(k));
      } catch (...) {
        errors[static_cast<std::size_t>(k)] = std::current_exception();
      }
    }
  } else {
    for (long long k = 0; k < n; ++k) {
      try {
        body(static_cast<std::size_t>(k));
      } catch (...) {
        errors[static_cast<std::size_t>(k)] = std::current_exception();
      }
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double ordered_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

const char* method_name(Method m) noexcept {
  switch (m) {
    case Method::Usdr: return "usdr";
    case Method::BlindAll: return "blind_all";
    case Method::BlindEnsemble: return "blind_ensemble";
    case Method::Clean: return "clean";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (auto m : kAllMethods)
    if (name == method_name(m)) return m;
  throw Error(Errc::InvalidArgument, "unknown method '" + name + "'");
}

std::uint64_t member_seed(std::uint64_t base_seed, std::size_t j) noexcept {
  return splitmix64(splitmix64(base_seed) ^ static_cast<std::uint64_t>(j));
}

std::vector<FittedModel> train_members(const Dataset& data, const SubsetPlan& plan,
                                       const ModelConfig& config, std::uint64_t base_seed,
                                       const std::vector<std::size_t>& subset_ids,
                                       Execution exec) {
  require_plan_matches(data, plan);
  std::vector<FittedModel> models(subset_ids.size());
  for_each_index(subset_ids.size(), exec, [&](std::size_t k) {
    const std::size_t j = subset_ids[k];
    if (j >= plan.m) throw Error(Errc::IndexOutOfRange, "subset id out of range");
    const auto& rows = plan.windows[j];
    try {
      models[k] = fit(with_seed(config, member_seed(base_seed, j)), gather_rows(data.inputs, rows),
                      gather_rows(data.targets, rows));
    } catch (const Error& e) {
      throw Error(e.code(), "subset " + std::to_string(j) + ": " + e.what());
    }
  });
  return models;
}

std::vector<FittedModel> train_ensemble(const Dataset& data, const SubsetPlan& plan,
                                        const ModelConfig& config, std::uint64_t base_seed,
                                        Execution exec) {
  std::vector<std::size_t> ids(plan.m);
  for (std::size_t j = 0; j < plan.m; ++j) ids[j] = j;
  return train_members(data, plan, config, base_seed, ids, exec);
}

ResidualMatrix residual_matrix(const Dataset& data, const SubsetPlan& plan,
                               const std::vector<FittedModel>& ensemble, Execution exec) {
  require_plan_matches(data, plan);
  if (ensemble.size() != plan.m)
    throw Error(Errc::DimensionMismatch, "ensemble has " + std::to_string(ensemble.size()) +
                                             " members, plan has " + std::to_string(plan.m));
  const auto n = data.size();
  const auto m = static_cast<Eigen::Index>(plan.m);
  ResidualMatrix rm;
  rm.r.resize(n, m);
  rm.in_training = BoolMatrix::Constant(n, m, false);
  for (std::size_t j = 0; j < plan.m; ++j)
    for (auto i : plan.windows[j]) rm.in_training(static_cast<Eigen::Index>(i), j) = true;

  for_each_index(plan.m, exec, [&](std::size_t j) {
    const auto& model = ensemble[j];
    const auto col = static_cast<Eigen::Index>(j);
    if (model.sigma <= kSigmaFloor) {
      rm.r.col(col).setZero();
      return;
    }
    const Vector raw = raw_residuals(data.targets, predict(model, data.inputs), model.reduction);
    rm.r.col(col) = (raw.array() - model.mu) / model.sigma;
  });
  return rm;
}

std::vector<double> usdr_scores(const ResidualMatrix& rm, const SubsetPlan& plan) {
  const auto n = rm.r.rows();
  const auto m = rm.r.cols();
  if (static_cast<std::size_t>(m) != plan.m || static_cast<std::size_t>(n) != plan.n)
    throw Error(Errc::DimensionMismatch, "residual matrix shape differs from plan");
  std::vector<double> scores(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    double in_sum = 0.0, out_sum = 0.0;
    std::size_t in_count = 0;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (rm.in_training(i, j)) {
        in_sum += rm.r(i, j);
        ++in_count;
      } else {
        out_sum += rm.r(i, j);
      }
    }
    const std::size_t out_count = static_cast<std::size_t>(m) - in_count;
    if (in_count == 0 || out_count == 0)
      throw Error(Errc::DimensionMismatch,
                  "sample " + std::to_string(i) + " needs both in- and out-of-subset models");
    scores[static_cast<std::size_t>(i)] = out_sum / static_cast<double>(out_count) -
                                          in_sum / static_cast<double>(in_count);
  }
  return scores;
}

std::vector<double> blind_all_scores(const Dataset& data, const ModelConfig& config,
                                     std::uint64_t seed) {
  const FittedModel model = fit(with_seed(config, seed), data.inputs, data.targets);
  const Vector r = raw_residuals(data.targets, predict(model, data.inputs), model.reduction);
  return std::vector<double>(r.data(), r.data() + r.size());
}

std::vector<double> column_mean_scores(const ResidualMatrix& rm,
                                       const std::vector<std::size_t>& columns) {
  if (columns.empty()) throw Error(Errc::InvalidArgument, "no columns to average");
  std::vector<double> scores(static_cast<std::size_t>(rm.r.rows()));
  for (Eigen::Index i = 0; i < rm.r.rows(); ++i) {
    double s = 0.0;
    for (auto j : columns) s += rm.r(i, static_cast<Eigen::Index>(j));
    scores[static_cast<std::size_t>(i)] = s / static_cast<double>(columns.size());
  }
  return scores;
}

std::vector<double> blind_ensemble_scores(const ResidualMatrix& rm) {
  std::vector<std::size_t> all(static_cast<std::size_t>(rm.r.cols()));
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
  return column_mean_scores(rm, all);
}

std::vector<std::size_t> clean_subsets(const SubsetPlan& plan, const std::vector<bool>& mask) {
  if (mask.size() != plan.n)
    throw Error(Errc::DimensionMismatch, "mask length differs from sample count");
  std::vector<std::size_t> ids;
  for (std::size_t j = 0; j < plan.m; ++j) {
    const auto& win = plan.windows[j];
    if (std::all_of(win.begin(), win.end(), [&](std::size_t i) { return mask[i]; }))
      ids.push_back(j);
  }
  return ids;
}

std::vector<double> clean_scores(const Dataset& data, const SubsetPlan& plan,
                                 const ModelConfig& config, const std::vector<bool>& normal_mask,
                                 CleanMode mode, std::uint64_t base_seed, Execution exec) {
  require_plan_matches(data, plan);
  if (normal_mask.size() != plan.n)
    throw Error(Errc::DimensionMismatch, "mask length differs from sample count");

  if (mode == CleanMode::Prefix) {
    const auto prefix = static_cast<Eigen::Index>(
        std::find(normal_mask.begin(), normal_mask.end(), false) - normal_mask.begin());
    if (prefix < 2)
      throw Error(Errc::NoCleanSubset, "clean prefix must contain at least two samples");
    const FittedModel model = fit(with_seed(config, member_seed(base_seed, plan.m)),
                                  data.inputs.topRows(prefix), data.targets.topRows(prefix));
    const Vector r = raw_residuals(data.targets, predict(model, data.inputs), model.reduction);
    return std::vector<double>(r.data(), r.data() + r.size());
  }

  const auto ids = clean_subsets(plan, normal_mask);
  if (ids.empty()) throw Error(Errc::NoCleanSubset, "no subset lies entirely inside the clean mask");
  const auto members = train_members(data, plan, config, base_seed, ids, exec);

  // only the clean columns are filled
  ResidualMatrix rm;
  rm.r = Matrix::Zero(data.size(), static_cast<Eigen::Index>(plan.m));
  for_each_index(ids.size(), exec, [&](std::size_t k) {
    const auto& model = members[k];
    const auto col = static_cast<Eigen::Index>(ids[k]);
    if (model.sigma <= kSigmaFloor) return;
    const Vector raw = raw_residuals(data.targets, predict(model, data.inputs), model.reduction);
    rm.r.col(col) = (raw.array() - model.mu) / model.sigma;
  });
  return column_mean_scores(rm, ids);
}

ScoreSeries postprocess(const std::vector<double>& raw, std::size_t smooth_window,
                        Method method) {
  if (smooth_window < 1) throw Error(Errc::InvalidArgument, "smoothing window must be >= 1");
  ScoreSeries out;
  out.method = method;
  out.smoothing_window = smooth_window;
  out.values.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const std::size_t first = i + 1 >= smooth_window ? i + 1 - smooth_window : 0;
    double s = 0.0;
    for (std::size_t t = first; t <= i; ++t) s += raw[t];
    out.values[i] = s / static_cast<double>(i - first + 1);
  }
  if (out.values.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(out.values.begin(), out.values.end());
  const double lo = *lo_it, hi = *hi_it;
  const double range = hi - lo;
  for (double& v : out.values) v = range > 0.0 ? (v - lo) / range : 0.0;
  return out;
}

StandardizationReport check_standardization(const ResidualMatrix& rm,
                                            const std::vector<FittedModel>& ensemble) {
  StandardizationReport rep;
  for (Eigen::Index j = 0; j < rm.r.cols(); ++j) {
    std::vector<double> col;
    for (Eigen::Index i = 0; i < rm.r.rows(); ++i)
      if (rm.in_training(i, j)) col.push_back(rm.r(i, j));
    if (ensemble[static_cast<std::size_t>(j)].sigma <= kSigmaFloor) {
      ++rep.clamped_columns;
      if (!rm.r.col(j).isZero(0.0)) rep.clamped_columns_zero = false;
      continue;
    }
    const double mean = ordered_mean(col);
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(col.size()));
    rep.max_abs_mean = std::max(rep.max_abs_mean, std::abs(mean));
    rep.max_std_error = std::max(rep.max_std_error, std::abs(sd - 1.0));
  }
  return rep;
}

}  // namespace usdr
