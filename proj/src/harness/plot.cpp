#include "advdet/harness/plot.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "advdet/core/image_io.hpp"

namespace advdet {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 480;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 160;
constexpr int kMarginTop = 50;
constexpr int kMarginBottom = 60;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

}  // namespace

void write_line_chart_svg(const std::string& path, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          const std::vector<PlotSeries>& series) {
  require(!series.empty(), ErrorCode::InvalidArgument, "chart needs at least one series");
  double xmin = std::numeric_limits<double>::max(), xmax = std::numeric_limits<double>::lowest();
  double ymin = xmin, ymax = xmax;
  for (const auto& s : series) {
    require(s.x.size() == s.y.size() && !s.x.empty(), ErrorCode::InvalidArgument,
            "chart series '" + s.name + "' is empty or ragged");
    for (double v : s.x) {
      xmin = std::min(xmin, v);
      xmax = std::max(xmax, v);
    }
    for (double v : s.y) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto sx = [&](double v) { return kMarginLeft + (v - xmin) / (xmax - xmin) * plot_w; };
  auto sy = [&](double v) { return kMarginTop + (1.0 - (v - ymin) / (ymax - ymin)) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"28\" font-size=\"18\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\">"
      << title << "</text>\n";

  // Axes box and ticks.
  svg << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#333\"/>\n";
  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    const double fx = xmin + (xmax - xmin) * i / ticks;
    const double fy = ymin + (ymax - ymin) * i / ticks;
    svg << "<line x1=\"" << sx(fx) << "\" y1=\"" << kMarginTop + plot_h << "\" x2=\"" << sx(fx)
        << "\" y2=\"" << kMarginTop + plot_h + 5 << "\" stroke=\"#333\"/>\n"
        << "<text x=\"" << sx(fx) << "\" y=\"" << kMarginTop + plot_h + 20
        << "\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">" << fmt(fx)
        << "</text>\n"
        << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << sy(fy) << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << sy(fy) << "\" stroke=\"#333\"/>\n"
        << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << sy(fy) + 4
        << "\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">" << fmt(fy)
        << "</text>\n";
  }
  svg << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 14
      << "\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\">" << x_label
      << "</text>\n"
      << "<text x=\"18\" y=\"" << kMarginTop + plot_h / 2
      << "\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "transform=\"rotate(-90 18 "
      << kMarginTop + plot_h / 2 << ")\">" << y_label << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < series[si].x.size(); ++i) {
      svg << sx(series[si].x[i]) << "," << sy(series[si].y[i]) << " ";
    }
    svg << "\"/>\n";
    const double ly = kMarginTop + 16.0 * static_cast<double>(si);
    svg << "<line x1=\"" << kWidth - kMarginRight + 12 << "\" y1=\"" << ly + 10 << "\" x2=\""
        << kWidth - kMarginRight + 34 << "\" y2=\"" << ly + 10 << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << kWidth - kMarginRight + 40 << "\" y=\"" << ly + 14
        << "\" font-size=\"12\" font-family=\"sans-serif\">" << series[si].name << "</text>\n";
  }
  svg << "</svg>\n";

  std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot write chart: " + path);
  out << svg.str();
}

void write_image_panel_png(const std::string& path,
                           const std::vector<std::vector<Tensor3<float>>>& grid) {
  require(!grid.empty() && !grid.front().empty(), ErrorCode::InvalidArgument,
          "panel grid is empty");
  const int cell_h = grid[0][0].height;
  const int cell_w = grid[0][0].width;
  const int gap = 2;
  const int rows = static_cast<int>(grid.size());
  const int cols = static_cast<int>(grid[0].size());
  for (const auto& row : grid) {
    require(static_cast<int>(row.size()) == cols, ErrorCode::InvalidArgument,
            "panel grid is ragged");
    for (const auto& cell : row) {
      require(cell.channels == 3 && cell.height == cell_h && cell.width == cell_w,
              ErrorCode::InvalidArgument, "panel cells must share one RGB shape");
    }
  }

  RawImage panel;
  panel.height = rows * cell_h + (rows + 1) * gap;
  panel.width = cols * cell_w + (cols + 1) * gap;
  panel.channels = 3;
  panel.pixels.assign(static_cast<std::size_t>(panel.height) * panel.width * 3, 32);

  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int top = gap + r * (cell_h + gap);
      const int left = gap + c * (cell_w + gap);
      const Tensor3<float>& cell = grid[r][c];
      for (int y = 0; y < cell_h; ++y) {
        for (int x = 0; x < cell_w; ++x) {
          for (int ch = 0; ch < 3; ++ch) {
            const float v = std::clamp(cell(ch, y, x), 0.0f, 1.0f);
            panel.at(top + y, left + x, ch) =
                static_cast<std::uint8_t>(std::lround(v * 255.0f));
          }
        }
      }
    }
  }
  save_png(panel, path);
}

}  // namespace advdet
