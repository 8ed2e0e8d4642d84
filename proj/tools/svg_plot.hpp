#pragma once

#include <string>
#include <vector>

namespace qntk::lab {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  int width = 640;
  int height = 420;
};

/// Standalone SVG line chart. Points that cannot be shown on a log axis are dropped.
std::string render_svg(const PlotSpec& spec, const std::vector<Series>& series);

}  // namespace qntk::lab
