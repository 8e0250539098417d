#include "snowlens/core/raster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "snowlens/core/taxonomy.hpp"
#include "snowlens/error.hpp"
#include "snowlens/simd/kernels.hpp"

namespace snowlens {

namespace {

void check_positive(int height, int width, const char* what) {
  if (height < 1 || width < 1)
    throw DimensionError(std::string(what) + " dimensions must be >= 1, got " +
                         std::to_string(height) + "x" + std::to_string(width));
}

}  // namespace

RgbImage::RgbImage(int height, int width, Range range, float fill)
    : height_(height), width_(width), range_(range) {
  check_positive(height, width, "image");
  pixels_.assign(static_cast<std::size_t>(height) * width * 3, fill);
}

RgbImage RgbImage::to_signed_unit() const {
  RgbImage out = *this;
  out.range_ = Range::signed_unit;
  if (range_ == Range::signed_unit) return out;
  for (float& v : out.pixels_) v = v / 127.5f - 1.0f;
  return out;
}

RgbImage RgbImage::to_byte() const {
  RgbImage out = *this;
  out.range_ = Range::byte;
  for (float& v : out.pixels_) {
    const double scaled = range_ == Range::signed_unit ? (double(v) + 1.0) * 127.5 : double(v);
    v = static_cast<float>(std::clamp(std::floor(scaled + 0.5), 0.0, 255.0));
  }
  return out;
}

void RgbImage::validate() const {
  const float lo = range_ == Range::byte ? 0.0f : -1.0f;
  const float hi = range_ == Range::byte ? 255.0f : 1.0f;
  for (std::size_t i = 0; i < pixels_.size(); ++i) {
    const float v = pixels_[i];
    if (!(v >= lo && v <= hi))
      throw ValueError("image value " + std::to_string(v) + " outside declared range at offset " +
                       std::to_string(i));
  }
}

LabelMap::LabelMap(int height, int width, std::uint8_t fill)
    : height_(height), width_(width) {
  check_positive(height, width, "label map");
  check_class_index(fill);
  labels_.assign(static_cast<std::size_t>(height) * width, fill);
}

LabelMap::LabelMap(int height, int width, std::vector<std::uint8_t> labels)
    : height_(height), width_(width), labels_(std::move(labels)) {
  check_positive(height, width, "label map");
  if (labels_.size() != static_cast<std::size_t>(height) * width)
    throw DimensionError("label buffer size does not match dimensions");
  validate();
}

void LabelMap::validate() const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] >= kNumClasses)
      throw ValueError("label " + std::to_string(labels_[i]) + " outside 0..5 at offset " +
                       std::to_string(i));
  }
}

PixelMask::PixelMask(int height, int width)
    : height_(height), width_(width), bits_(static_cast<std::size_t>(height) * width, 0) {
  check_positive(height, width, "mask");
}

PixelMask::PixelMask(int height, int width, std::vector<std::uint8_t> bits)
    : height_(height), width_(width), bits_(std::move(bits)) {
  check_positive(height, width, "mask");
  if (bits_.size() != static_cast<std::size_t>(height) * width)
    throw DimensionError("mask buffer size does not match dimensions");
  for (auto& b : bits_) b = b != 0 ? 1 : 0;
}

std::size_t PixelMask::popcount() const {
  return simd::kernels().count_nonzero(bits_.size(), bits_.data());
}

void require_same_dims(int h1, int w1, int h2, int w2, const char* what) {
  if (h1 != h2 || w1 != w2)
    throw DimensionError(std::string(what) + ": dimension mismatch " + std::to_string(h1) + "x" +
                         std::to_string(w1) + " vs " + std::to_string(h2) + "x" +
                         std::to_string(w2));
}

}  // namespace snowlens
