#pragma once

#include "usdr/refine.hpp"

#include <vector>

namespace usdr {

struct PrPoint {
  double threshold;
  double precision;
  double recall;
};

// Points ordered by descending threshold (recall non-decreasing along the
// list). Sample i counts as predicted positive when score_i >= threshold.
struct PrCurve {
  std::vector<PrPoint> points;
  double ap = 0.0;
};

// One point per distinct score value; tied samples cross together.
// AP = sum_n (R_n - R_{n-1}) * P_n with R_0 = 0.
PrCurve pr_curve(const std::vector<double>& scores, const std::vector<int>& labels);
PrCurve pr_curve(const ScoreSeries& scores, const std::vector<int>& labels);

double rmse(const std::vector<double>& a, const std::vector<double>& b);
double rmse(const ScoreSeries& scores, const std::vector<double>& degradation_truth);

// g = 1 - h with h min-max rescaled to [0,1]; rises as health falls.
std::vector<double> degradation_truth(const std::vector<double>& health);

}  // namespace usdr
