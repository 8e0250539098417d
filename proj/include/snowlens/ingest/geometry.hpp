#pragma once

#include <optional>
#include <vector>

#include "snowlens/core/raster.hpp"

namespace snowlens::ingest {

struct Size2 {
  int height = 0;
  int width = 0;
  bool operator==(const Size2&) const = default;
};

inline constexpr Size2 kUnifiedSize{480, 720};
inline constexpr Size2 kPaperTranslatorSize{512, 768};
inline constexpr Size2 kDeskTranslatorSize{128, 192};
inline constexpr Size2 kPaperAnnotationSize{598, 1196};

// Bilinear resample with half-pixel centres and edge clamping (the OpenCV /
// align_corners=false convention). Same-size input is returned unchanged.
RgbImage resize_bilinear(const RgbImage& image, int height, int width);

// Bilinear resize to the unified training size (480x720 by default).
RgbImage unify_size(const RgbImage& image, Size2 target = kUnifiedSize);

// Bilinear resize to a generator input size. Each target dimension must be a
// multiple of 2^depth; otherwise ValueError names the required multiple.
RgbImage resize_for_translator(const RgbImage& image, Size2 target, int depth);

struct Crop {
  int row = 0;
  int col = 0;
  RgbImage image;
  std::optional<LabelMap> label;
};

// Splits an exactly rows*size x cols*size raster into rows*cols disjoint
// tiles, row-major. Throws DimensionError for any other input size.
std::vector<Crop> crop_grid(const RgbImage& image, const std::optional<LabelMap>& label,
                            int rows, int cols, int size);

// Inverse of crop_grid (image part).
RgbImage reassemble_grid(const std::vector<Crop>& crops, int rows, int cols);
LabelMap reassemble_labels(const std::vector<LabelMap>& tiles, int rows, int cols);

}  // namespace snowlens::ingest
