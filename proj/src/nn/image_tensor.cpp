#include "snowlens/nn/image_tensor.hpp"

namespace snowlens::nn {

Tensor<float> images_to_tensor(const std::vector<const RgbImage*>& images) {
  if (images.empty()) throw ValueError("images_to_tensor: no images");
  const int h = images[0]->height();
  const int w = images[0]->width();
  Tensor<float> t(static_cast<int>(images.size()), 3, h, w);
  for (std::size_t i = 0; i < images.size(); ++i) {
    require_same_dims(*images[0], *images[i], "images_to_tensor");
    const RgbImage unit =
        images[i]->range() == Range::signed_unit ? *images[i] : images[i]->to_signed_unit();
    const auto v = unit.values();
    for (int c = 0; c < 3; ++c) {
      float* dst = t.channel(static_cast<int>(i), c);
      for (std::size_t p = 0; p < t.plane(); ++p) dst[p] = v[p * 3 + c];
    }
  }
  return t;
}

Tensor<float> image_to_tensor(const RgbImage& image) { return images_to_tensor({&image}); }

RgbImage tensor_to_image(const Tensor<float>& t, int index) {
  if (t.c != 3) throw DimensionError("tensor_to_image: expected 3 channels, got " + t.shape_str());
  if (index < 0 || index >= t.n) throw DimensionError("tensor_to_image: sample index out of range");
  RgbImage img(t.h, t.w, Range::signed_unit);
  auto v = img.values();
  for (int c = 0; c < 3; ++c) {
    const float* src = t.channel(index, c);
    for (std::size_t p = 0; p < t.plane(); ++p) v[p * 3 + c] = src[p];
  }
  return img;
}

}  // namespace snowlens::nn
