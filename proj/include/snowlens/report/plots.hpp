#pragma once

#include <vector>

#include "snowlens/core/raster.hpp"
#include "snowlens/core/taxonomy.hpp"
#include "snowlens/metrics/metrics.hpp"

namespace snowlens::report {

// Row-major tiling of equally sized images; unused cells stay black.
// Throws DimensionError on mixed sizes and ValueError when the images do not
// fit the grid.
RgbImage emit_montage(const std::vector<RgbImage>& images, int rows, int cols);

struct BarplotStyle {
  int plot_height = 200;  // pixels spanned by the [0, 1] axis
  int bar_width = 12;
  int gap = 4;
  int margin = 16;
  Rgb bar{31, 119, 180};
  Rgb flagged{255, 127, 14};  // empty-mask entries
  Rgb axis{0, 0, 0};
  Rgb grid{200, 200, 200};
  Rgb background{255, 255, 255};
};

struct BarGeometry {
  int x0 = 0;      // first column of the bar
  int width = 0;
  int height = 0;  // filled pixels, round(value * plot_height)
};

// One bar per report entry in order; y axis fixed to [0, 1] with grid lines
// at 0.25 steps. Flagged entries use the flagged colour plus a full-height
// outline so zero-height flagged bars stay visible.
RgbImage emit_dice_barplot(const metrics::DiceReport& report, const BarplotStyle& style = {});

// Layout used by emit_dice_barplot (for reading values back).
std::vector<BarGeometry> barplot_geometry(const metrics::DiceReport& report,
                                          const BarplotStyle& style = {});
// Row of the zero line in a plot produced with `style`.
int barplot_baseline(const BarplotStyle& style = {});

}  // namespace snowlens::report
