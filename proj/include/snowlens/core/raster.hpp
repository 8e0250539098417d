#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace snowlens {

// Declared value convention of an RgbImage.
enum class Range {
  byte,         // [0, 255]
  signed_unit,  // [-1, 1]
};

// H x W x 3 raster, interleaved RGB, stored as float so that resampled
// intermediates keep their fractional values. Carrier of night (N), day (J),
// fake-day (K) and road-surface (F) frames.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int height, int width, Range range = Range::byte, float fill = 0.0f);

  int height() const { return height_; }
  int width() const { return width_; }
  Range range() const { return range_; }
  bool empty() const { return pixels_.empty(); }
  std::size_t pixel_count() const { return static_cast<std::size_t>(height_) * width_; }

  float& at(int y, int x, int c) { return pixels_[index(y, x, c)]; }
  float at(int y, int x, int c) const { return pixels_[index(y, x, c)]; }

  std::span<float> values() { return pixels_; }
  std::span<const float> values() const { return pixels_; }

  // x / 127.5 - 1
  RgbImage to_signed_unit() const;
  // (x + 1) * 127.5, rounded half up and clamped to [0, 255]. On a byte image
  // this only quantizes.
  RgbImage to_byte() const;

  // Throws ValueError when a value lies outside the declared range.
  void validate() const;

  bool operator==(const RgbImage&) const = default;

 private:
  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * 3 + c;
  }

  int height_ = 0;
  int width_ = 0;
  Range range_ = Range::byte;
  std::vector<float> pixels_;
};

// Per-pixel class indices over the six-class taxonomy. Carrier of DrL, DfL,
// RsL and ScL.
class LabelMap {
 public:
  LabelMap() = default;
  LabelMap(int height, int width, std::uint8_t fill = 0);
  // Throws ValueError if any label is outside 0..5.
  LabelMap(int height, int width, std::vector<std::uint8_t> labels);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t pixel_count() const { return labels_.size(); }

  std::uint8_t& at(int y, int x) { return labels_[static_cast<std::size_t>(y) * width_ + x]; }
  std::uint8_t at(int y, int x) const { return labels_[static_cast<std::size_t>(y) * width_ + x]; }

  std::span<std::uint8_t> labels() { return labels_; }
  std::span<const std::uint8_t> labels() const { return labels_; }

  void validate() const;

  bool operator==(const LabelMap&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> labels_;
};

// H x W boolean raster, one byte per pixel holding 0 or 1.
class PixelMask {
 public:
  PixelMask() = default;
  PixelMask(int height, int width, std::vector<std::uint8_t> bits);
  PixelMask(int height, int width);

  int height() const { return height_; }
  int width() const { return width_; }

  bool at(int y, int x) const { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
  void set(int y, int x, bool v) { bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0; }

  std::span<const std::uint8_t> bits() const { return bits_; }
  std::size_t popcount() const;

  bool operator==(const PixelMask&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> bits_;
};

void require_same_dims(int h1, int w1, int h2, int w2, const char* what);

template <class A, class B>
void require_same_dims(const A& a, const B& b, const char* what) {
  require_same_dims(a.height(), a.width(), b.height(), b.width(), what);
}

}  // namespace snowlens
