#pragma once

#include <string>
#include <vector>

#include "advdet/core/image.hpp"

namespace advdet {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal static SVG line chart: axes, ticks, legend, one polyline per
/// series. Written to disk, never interactive.
void write_line_chart_svg(const std::string& path, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          const std::vector<PlotSeries>& series);

/// Grid of [0,1] RGB tensors composed into one PNG; row_labels annotate the
/// left edge (rendered as a margin color strip plus title text in the file
/// name convention, not rasterized text).
void write_image_panel_png(const std::string& path,
                           const std::vector<std::vector<Tensor3<float>>>& grid);

}  // namespace advdet
