#include "snowlens/core/mask_ops.hpp"

#include <algorithm>
#include <cmath>

#include "snowlens/error.hpp"
#include "snowlens/simd/kernels.hpp"

namespace snowlens {

namespace {

float blend(float base, std::uint8_t color, double alpha) {
  const double v = (1.0 - alpha) * double(base) + alpha * double(color);
  return static_cast<float>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValueError("overlay alpha must lie in [0,1]");
}

}  // namespace

PixelMask class_mask(const LabelMap& label, int cls) {
  check_class_index(cls);
  std::vector<std::uint8_t> bits(label.pixel_count());
  simd::kernels().class_equal(bits.size(), label.labels().data(),
                              static_cast<std::uint8_t>(cls), bits.data());
  return PixelMask(label.height(), label.width(), std::move(bits));
}

PixelMask mask_intersection(const PixelMask& a, const PixelMask& b) {
  require_same_dims(a, b, "mask_intersection");
  std::vector<std::uint8_t> bits(a.bits().size());
  simd::kernels().mask_and(bits.size(), a.bits().data(), b.bits().data(), bits.data());
  return PixelMask(a.height(), a.width(), std::move(bits));
}

RgbImage overlay(const RgbImage& image, const LabelMap& label, double alpha,
                 const ClassTaxonomy& tax) {
  require_same_dims(image, label, "overlay");
  check_alpha(alpha);
  RgbImage out = image.to_byte();
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      const Rgb c = tax.at(label.at(y, x)).color;
      out.at(y, x, 0) = blend(out.at(y, x, 0), c.r, alpha);
      out.at(y, x, 1) = blend(out.at(y, x, 1), c.g, alpha);
      out.at(y, x, 2) = blend(out.at(y, x, 2), c.b, alpha);
    }
  }
  return out;
}

RgbImage overlay_mask(const RgbImage& image, const PixelMask& mask, Rgb color, double alpha) {
  require_same_dims(image, mask, "overlay_mask");
  check_alpha(alpha);
  RgbImage out = image.to_byte();
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      if (!mask.at(y, x)) continue;
      out.at(y, x, 0) = blend(out.at(y, x, 0), color.r, alpha);
      out.at(y, x, 1) = blend(out.at(y, x, 1), color.g, alpha);
      out.at(y, x, 2) = blend(out.at(y, x, 2), color.b, alpha);
    }
  }
  return out;
}

RgbImage colorize(const LabelMap& label, const ClassTaxonomy& tax) {
  RgbImage out(label.height(), label.width(), Range::byte);
  for (int y = 0; y < label.height(); ++y) {
    for (int x = 0; x < label.width(); ++x) {
      const Rgb c = tax.at(label.at(y, x)).color;
      out.at(y, x, 0) = c.r;
      out.at(y, x, 1) = c.g;
      out.at(y, x, 2) = c.b;
    }
  }
  return out;
}

LabelMap resize_nearest(const LabelMap& label, int height, int width) {
  if (height < 1 || width < 1) throw ValueError("resize target must be positive");
  if (height == label.height() && width == label.width()) return label;
  LabelMap out(height, width);
  const double sy = double(label.height()) / height;
  const double sx = double(label.width()) / width;
  for (int y = 0; y < height; ++y) {
    const int src_y = std::min(label.height() - 1, static_cast<int>(std::floor((y + 0.5) * sy)));
    for (int x = 0; x < width; ++x) {
      const int src_x = std::min(label.width() - 1, static_cast<int>(std::floor((x + 0.5) * sx)));
      out.at(y, x) = label.at(src_y, src_x);
    }
  }
  return out;
}

}  // namespace snowlens
