#pragma once

#include <string>
#include <vector>

#include "hfeq/spectral.hpp"

namespace hfeq::scenarios::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

std::string line_plot(const LinePlot& plot);

// Axes show detuning from the grid centres in GHz; the field is downsampled
// to at most max_cells per side.
std::string heatmap(const RealField2D& field, const std::string& title, std::size_t max_cells = 160);

}  // namespace hfeq::scenarios::svg
