#pragma once

#include <string>
#include <vector>

namespace complyctl {

struct SvgSeries {
  std::string label;
  std::string color = "#1f77b4";
  bool dashed = false;
  std::vector<double> x;
  std::vector<double> y;
};

// Writes a self-contained polyline plot with axes and a legend.
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<SvgSeries>& series);

}  // namespace complyctl
