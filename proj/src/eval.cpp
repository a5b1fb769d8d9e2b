#include "usdr/eval.hpp"

#include "usdr/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace usdr {

PrCurve pr_curve(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw Error(Errc::DimensionMismatch, "scores and labels differ in length");
  const auto positives = std::count(labels.begin(), labels.end(), 1);
  const auto total = static_cast<std::ptrdiff_t>(labels.size());
  if (positives == 0) throw Error(Errc::NoPositives, "AP is undefined without positive labels");
  if (positives == total) throw Error(Errc::NoNegatives, "AP is undefined without negative labels");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  PrCurve curve;
  std::size_t tp = 0, fp = 0;
  double prev_recall = 0.0;
  for (std::size_t k = 0; k < order.size();) {
    const double threshold = scores[order[k]];
    for (; k < order.size() && scores[order[k]] == threshold; ++k)
      (labels[order[k]] == 1 ? tp : fp) += 1;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = static_cast<double>(tp) / static_cast<double>(positives);
    curve.ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    curve.points.push_back({threshold, precision, recall});
  }
  return curve;
}

PrCurve pr_curve(const ScoreSeries& scores, const std::vector<int>& labels) {
  return pr_curve(scores.values, labels);
}

double rmse(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw Error(Errc::DimensionMismatch, "rmse operands differ in length");
  if (a.empty()) throw Error(Errc::InvalidArgument, "rmse of empty vectors");
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ss += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(ss / static_cast<double>(a.size()));
}

double rmse(const ScoreSeries& scores, const std::vector<double>& truth) {
  return rmse(scores.values, truth);
}

std::vector<double> degradation_truth(const std::vector<double>& health) {
  if (health.empty()) return {};
  const auto [lo, hi] = std::minmax_element(health.begin(), health.end());
  const double range = *hi - *lo;
  std::vector<double> g(health.size());
  for (std::size_t i = 0; i < health.size(); ++i)
    g[i] = range > 0.0 ? 1.0 - (health[i] - *lo) / range : 0.0;
  return g;
}

}  // namespace usdr
