#pragma once

#include <string>
#include <utility>
#include <vector>

namespace credsel::svg {

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
  bool markers = false;  // scatter markers instead of a polyline
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  // Axis limits; when lo == hi they are taken from the data.
  double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;
};

std::string line_plot(const PlotSpec& spec, const std::vector<Series>& series);
std::string bar_chart(const std::string& title, const std::vector<std::string>& labels,
                      const std::vector<double>& values);

}  // namespace credsel::svg
