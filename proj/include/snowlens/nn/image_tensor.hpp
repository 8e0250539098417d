#pragma once

#include <vector>

#include "snowlens/core/raster.hpp"
#include "snowlens/nn/tensor.hpp"

namespace snowlens::nn {

// Packs images (converted to [-1, 1]) into an N x 3 x H x W tensor. All images
// must share dimensions.
Tensor<float> images_to_tensor(const std::vector<const RgbImage*>& images);
Tensor<float> image_to_tensor(const RgbImage& image);

// Sample `index` of an N x 3 x H x W tensor as a signed-unit image.
RgbImage tensor_to_image(const Tensor<float>& t, int index = 0);

}  // namespace snowlens::nn
