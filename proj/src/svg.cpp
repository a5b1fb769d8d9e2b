#include "usdr/svg.hpp"

#include <algorithm>
#include <cstdio>

namespace usdr {

namespace {

constexpr double kPanelWidth = 720.0;
constexpr double kPanelHeight = 140.0;
constexpr double kMarginLeft = 48.0;
constexpr double kMarginTop = 36.0;
constexpr double kGap = 28.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// values assumed in [0,1]; y grows downward in SVG
std::string polyline(const std::vector<double>& v, double top, const char* style) {
  std::string pts;
  const double n = static_cast<double>(std::max<std::size_t>(v.size(), 2) - 1);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = kMarginLeft + kPanelWidth * static_cast<double>(i) / n;
    const double y = top + kPanelHeight * (1.0 - std::clamp(v[i], 0.0, 1.0));
    pts += num(x) + ',' + num(y) + ' ';
  }
  return "<polyline fill=\"none\" " + std::string(style) + " points=\"" + pts + "\"/>\n";
}

}  // namespace

std::string score_plot_svg(const std::vector<ScoreSeries>& scores,
                           const std::optional<std::vector<double>>& truth,
                           const std::string& title) {
  const double height =
      kMarginTop + static_cast<double>(scores.size()) * (kPanelHeight + kGap) + 8.0;
  const double width = kMarginLeft + kPanelWidth + 16.0;
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
                    "\" height=\"" + num(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty())
    svg += "<text x=\"" + num(kMarginLeft) + "\" y=\"20\" font-size=\"14\">" + escape(title) +
           "</text>\n";
  for (std::size_t p = 0; p < scores.size(); ++p) {
    const double top = kMarginTop + static_cast<double>(p) * (kPanelHeight + kGap);
    svg += "<rect x=\"" + num(kMarginLeft) + "\" y=\"" + num(top) + "\" width=\"" +
           num(kPanelWidth) + "\" height=\"" + num(kPanelHeight) +
           "\" fill=\"none\" stroke=\"#999\"/>\n";
    svg += "<text x=\"4\" y=\"" + num(top + 12) + "\">1</text>\n";
    svg += "<text x=\"4\" y=\"" + num(top + kPanelHeight) + "\">0</text>\n";
    svg += "<text x=\"" + num(kMarginLeft + 6) + "\" y=\"" + num(top + 14) + "\">" +
           escape(method_name(scores[p].method)) + "</text>\n";
    if (truth) svg += polyline(*truth, top, "stroke=\"#d62728\" stroke-dasharray=\"4 3\"");
    svg += polyline(scores[p].values, top, "stroke=\"#1f77b4\" stroke-width=\"1.2\"");
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace usdr
