#include "snowlens/report/plots.hpp"

#include <cmath>

#include "snowlens/error.hpp"

namespace snowlens::report {

RgbImage emit_montage(const std::vector<RgbImage>& images, int rows, int cols) {
  if (rows < 1 || cols < 1) throw ValueError("montage grid must be at least 1x1");
  if (images.empty()) throw ValueError("montage needs at least one image");
  if (images.size() > static_cast<std::size_t>(rows) * cols)
    throw ValueError("montage: " + std::to_string(images.size()) + " images exceed a " +
                     std::to_string(rows) + "x" + std::to_string(cols) + " grid");
  const int h = images[0].height();
  const int w = images[0].width();
  for (const auto& img : images) require_same_dims(images[0], img, "montage");
  RgbImage out(rows * h, cols * w);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const RgbImage b = images[i].range() == Range::byte ? images[i] : images[i].to_byte();
    const int oy = static_cast<int>(i) / cols * h;
    const int ox = static_cast<int>(i) % cols * w;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int c = 0; c < 3; ++c) out.at(oy + y, ox + x, c) = b.at(y, x, c);
  }
  return out;
}

namespace {

void fill(RgbImage& img, int y0, int y1, int x0, int x1, Rgb c) {
  for (int y = std::max(0, y0); y < std::min(img.height(), y1); ++y)
    for (int x = std::max(0, x0); x < std::min(img.width(), x1); ++x) {
      img.at(y, x, 0) = c.r;
      img.at(y, x, 1) = c.g;
      img.at(y, x, 2) = c.b;
    }
}

}  // namespace

int barplot_baseline(const BarplotStyle& style) { return style.margin + style.plot_height; }

std::vector<BarGeometry> barplot_geometry(const metrics::DiceReport& report,
                                          const BarplotStyle& style) {
  std::vector<BarGeometry> out;
  int x = style.margin + style.gap + 1;
  for (const auto& e : report.entries) {
    const double v = std::clamp(e.dice.value, 0.0, 1.0);
    out.push_back({x, style.bar_width, static_cast<int>(std::lround(v * style.plot_height))});
    x += style.bar_width + style.gap;
  }
  return out;
}

RgbImage emit_dice_barplot(const metrics::DiceReport& report, const BarplotStyle& style) {
  if (report.entries.empty()) throw ValueError("dice bar plot needs a non-empty report");
  const auto bars = barplot_geometry(report, style);
  const int width = bars.back().x0 + style.bar_width + style.gap + style.margin;
  const int height = style.plot_height + 2 * style.margin + 1;
  const int base = barplot_baseline(style);
  RgbImage img(height, width);
  fill(img, 0, height, 0, width, style.background);
  for (int q = 1; q <= 4; ++q) {
    const int y = base - static_cast<int>(std::lround(q * 0.25 * style.plot_height));
    fill(img, y, y + 1, style.margin, width - style.margin, style.grid);
  }
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto& b = bars[i];
    const bool flagged = report.entries[i].dice.flagged();
    if (flagged) {
      const int top = base - style.plot_height;
      fill(img, top, top + 1, b.x0, b.x0 + b.width, style.flagged);
      fill(img, top, base, b.x0, b.x0 + 1, style.flagged);
      fill(img, top, base, b.x0 + b.width - 1, b.x0 + b.width, style.flagged);
    }
    fill(img, base - b.height, base, b.x0, b.x0 + b.width, flagged ? style.flagged : style.bar);
  }
  fill(img, base, base + 1, style.margin, width - style.margin, style.axis);
  fill(img, base - style.plot_height, base + 1, style.margin, style.margin + 1, style.axis);
  return img;
}

}  // namespace snowlens::report
