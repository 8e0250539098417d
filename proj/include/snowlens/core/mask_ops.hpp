#pragma once

#include "snowlens/core/raster.hpp"
#include "snowlens/core/taxonomy.hpp"

namespace snowlens {

// Bit set where label == cls. Throws ValueError for cls outside 0..5.
PixelMask class_mask(const LabelMap& label, int cls);

// Bitwise AND. Throws DimensionError when shapes differ.
PixelMask mask_intersection(const PixelMask& a, const PixelMask& b);

// Per-pixel (1 - alpha) * image + alpha * class colour, rounded half up to
// bytes. A signed-unit input is converted to bytes first.
RgbImage overlay(const RgbImage& image, const LabelMap& label, double alpha,
                 const ClassTaxonomy& tax = ClassTaxonomy::canonical());

// Same blend, restricted to the set bits of `mask`, with a single colour.
RgbImage overlay_mask(const RgbImage& image, const PixelMask& mask, Rgb color, double alpha);

// Renders the label map in pure palette colours (overlay with alpha = 1).
RgbImage colorize(const LabelMap& label, const ClassTaxonomy& tax = ClassTaxonomy::canonical());

// Nearest-neighbour resample with pixel-centre alignment. Class indices are
// never blended.
LabelMap resize_nearest(const LabelMap& label, int height, int width);

}  // namespace snowlens
