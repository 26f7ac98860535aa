#pragma once

#include <string>
#include <vector>

namespace csc::svg {

struct Series {
  std::string label;
  std::string color;  // any SVG color, e.g. "#1f77b4"
  std::vector<double> x;
  std::vector<double> y;
};

struct ScatterOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 640;
  int height = 480;
  double point_radius = 1.2;
};

// Static SVG 1.1 scatter plot: axes with ticks, one colored point set per
// series and a legend.  Axis ranges start at 0 and cover every point.
std::string scatter(const std::vector<Series>& series, const ScatterOptions& opt);

std::string xml_escape(const std::string& s);

}  // namespace csc::svg
