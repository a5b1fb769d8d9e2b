#pragma once

#include "usdr/refine.hpp"

#include <optional>
#include <string>
#include <vector>

namespace usdr {

// One polyline panel per score series over sample index, with the ground
// truth overlaid as a dashed line (labels or 1 - health, both in [0,1]).
std::string score_plot_svg(const std::vector<ScoreSeries>& scores,
                           const std::optional<std::vector<double>>& truth,
                           const std::string& title = "");

}  // namespace usdr
