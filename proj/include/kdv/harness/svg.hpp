#pragma once

#include <span>
#include <string>
#include <vector>

#include "kdv/grid.hpp"

namespace kdv::harness {

/// Stacked profiles V(X) offset upward by snapshot time (at most max_lines).
std::string waterfall_svg(std::span<const FieldState> snapshots, std::size_t max_lines = 24);

struct Series {
  std::string label;
  std::vector<double> x, y;
  std::string color;
};

/// Plain line plot with axes ticks at the data extremes and a legend.
std::string line_plot_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                          std::span<const Series> series);

}  // namespace kdv::harness
