#include "snowlens/ingest/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "snowlens/error.hpp"

namespace snowlens::ingest {

namespace {

struct Taps {
  std::vector<int> lo;
  std::vector<int> hi;
  std::vector<double> frac;
};

Taps bilinear_taps(int src, int dst) {
  Taps t;
  t.lo.resize(dst);
  t.hi.resize(dst);
  t.frac.resize(dst);
  const double scale = double(src) / dst;
  for (int i = 0; i < dst; ++i) {
    double s = (i + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, double(src - 1));
    const int lo = static_cast<int>(std::floor(s));
    t.lo[i] = lo;
    t.hi[i] = std::min(lo + 1, src - 1);
    t.frac[i] = s - lo;
  }
  return t;
}

}  // namespace

RgbImage resize_bilinear(const RgbImage& image, int height, int width) {
  if (height < 1 || width < 1)
    throw ValueError("resize target must be positive, got " + std::to_string(height) + "x" +
                     std::to_string(width));
  if (height == image.height() && width == image.width()) return image;
  const Taps ty = bilinear_taps(image.height(), height);
  const Taps tx = bilinear_taps(image.width(), width);
  RgbImage out(height, width, image.range());
  for (int y = 0; y < height; ++y) {
    const double fy = ty.frac[y];
    for (int x = 0; x < width; ++x) {
      const double fx = tx.frac[x];
      for (int c = 0; c < 3; ++c) {
        const double top = (1 - fx) * image.at(ty.lo[y], tx.lo[x], c) + fx * image.at(ty.lo[y], tx.hi[x], c);
        const double bot = (1 - fx) * image.at(ty.hi[y], tx.lo[x], c) + fx * image.at(ty.hi[y], tx.hi[x], c);
        out.at(y, x, c) = static_cast<float>((1 - fy) * top + fy * bot);
      }
    }
  }
  return out;
}

RgbImage unify_size(const RgbImage& image, Size2 target) {
  return resize_bilinear(image, target.height, target.width);
}

RgbImage resize_for_translator(const RgbImage& image, Size2 target, int depth) {
  if (depth < 1 || depth > 12) throw ValueError("generator depth must be in 1..12");
  const int multiple = 1 << depth;
  if (target.height < 1 || target.width < 1 || target.height % multiple != 0 ||
      target.width % multiple != 0) {
    throw ValueError("translator input " + std::to_string(target.height) + "x" +
                     std::to_string(target.width) + " must be a multiple of " +
                     std::to_string(multiple) + " in each dimension (depth " +
                     std::to_string(depth) + ")");
  }
  return resize_bilinear(image, target.height, target.width);
}

std::vector<Crop> crop_grid(const RgbImage& image, const std::optional<LabelMap>& label, int rows,
                            int cols, int size) {
  if (rows < 1 || cols < 1 || size < 1) throw ValueError("crop grid parameters must be positive");
  if (image.height() != rows * size || image.width() != cols * size) {
    throw DimensionError("crop_grid expects exactly " + std::to_string(rows * size) + "x" +
                         std::to_string(cols * size) + " input, got " +
                         std::to_string(image.height()) + "x" + std::to_string(image.width()) +
                         " (resize first)");
  }
  if (label) require_same_dims(image, *label, "crop_grid label");
  std::vector<Crop> crops;
  crops.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      Crop crop;
      crop.row = r;
      crop.col = c;
      crop.image = RgbImage(size, size, image.range());
      for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
          for (int ch = 0; ch < 3; ++ch)
            crop.image.at(y, x, ch) = image.at(r * size + y, c * size + x, ch);
      if (label) {
        LabelMap tile(size, size);
        for (int y = 0; y < size; ++y)
          for (int x = 0; x < size; ++x) tile.at(y, x) = label->at(r * size + y, c * size + x);
        crop.label = std::move(tile);
      }
      crops.push_back(std::move(crop));
    }
  }
  return crops;
}

RgbImage reassemble_grid(const std::vector<Crop>& crops, int rows, int cols) {
  if (crops.size() != static_cast<std::size_t>(rows) * cols || crops.empty())
    throw DimensionError("reassemble_grid: crop count does not match grid");
  const int size = crops.front().image.height();
  RgbImage out(rows * size, cols * size, crops.front().image.range());
  for (const auto& crop : crops) {
    if (crop.image.height() != size || crop.image.width() != size)
      throw DimensionError("reassemble_grid: tiles must share one square size");
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x)
        for (int ch = 0; ch < 3; ++ch)
          out.at(crop.row * size + y, crop.col * size + x, ch) = crop.image.at(y, x, ch);
  }
  return out;
}

LabelMap reassemble_labels(const std::vector<LabelMap>& tiles, int rows, int cols) {
  if (tiles.size() != static_cast<std::size_t>(rows) * cols || tiles.empty())
    throw DimensionError("reassemble_labels: tile count does not match grid");
  const int th = tiles.front().height();
  const int tw = tiles.front().width();
  LabelMap out(rows * th, cols * tw);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const LabelMap& tile = tiles[static_cast<std::size_t>(r) * cols + c];
      require_same_dims(tile.height(), tile.width(), th, tw, "reassemble_labels");
      for (int y = 0; y < th; ++y)
        for (int x = 0; x < tw; ++x) out.at(r * th + y, c * tw + x) = tile.at(y, x);
    }
  }
  return out;
}

}  // namespace snowlens::ingest
