#include "complyctl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace complyctl {

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<SvgSeries>& series) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("svg: cannot write '" + path + "'");

  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const SvgSeries& s : series) {
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (first) {
        xmin = xmax = s.x[i];
        ymin = ymax = s.y[i];
        first = false;
      }
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;

  const double w = 720, h = 420, ml = 60, mr = 20, mt = 40, mb = 40;
  const auto px = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr);
  };
  const auto py = [&](double y) {
    return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb);
  };

  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w
      << "' height='" << h << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << w / 2 << "' y='24' text-anchor='middle' "
      << "font-family='sans-serif' font-size='16'>" << title << "</text>\n";
  out << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr
      << "' y2='" << h - mb << "' stroke='black'/>\n";
  out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
      << h - mb << "' stroke='black'/>\n";
  out << "<text x='" << ml - 8 << "' y='" << py(ymin)
      << "' text-anchor='end' font-family='sans-serif' font-size='11'>"
      << ymin << "</text>\n";
  out << "<text x='" << ml - 8 << "' y='" << py(ymax)
      << "' text-anchor='end' font-family='sans-serif' font-size='11'>"
      << ymax << "</text>\n";

  int legend_y = static_cast<int>(mt);
  for (const SvgSeries& s : series) {
    out << "<polyline fill='none' stroke='" << s.color << "'"
        << (s.dashed ? " stroke-dasharray='6,4'" : "") << " points='";
    for (size_t i = 0; i < s.x.size(); ++i) {
      out << px(s.x[i]) << "," << py(s.y[i]) << " ";
    }
    out << "'/>\n";
    out << "<text x='" << w - mr - 150 << "' y='" << legend_y
        << "' font-family='sans-serif' font-size='12' fill='" << s.color
        << "'>" << s.label << (s.dashed ? " (dashed)" : "") << "</text>\n";
    legend_y += 16;
  }
  out << "</svg>\n";
}

}  // namespace complyctl
