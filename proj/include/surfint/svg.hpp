#pragma once

#include <string>
#include <vector>

namespace surfint {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;   // non-finite entries break the polyline
};

struct Plot {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<Series> series;
  std::vector<double> reference_lines;   // horizontal dashed lines, e.g. thresholds
};

// Self-contained SVG document with axes, ticks, polylines, markers and a legend.
std::string render_svg(const Plot& plot);

}  // namespace surfint
