#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "snowlens/nn/tensor.hpp"

namespace snowlens::nn {

// Activations. Backward passes take the saved forward *output*.
template <class T> Tensor<T> relu(const Tensor<T>& x);
template <class T> Tensor<T> relu_backward(const Tensor<T>& dy, const Tensor<T>& y);
template <class T> Tensor<T> relu6(const Tensor<T>& x);
template <class T> Tensor<T> relu6_backward(const Tensor<T>& dy, const Tensor<T>& y);
template <class T> Tensor<T> leaky_relu(const Tensor<T>& x, T slope);
template <class T> Tensor<T> leaky_relu_backward(const Tensor<T>& dy, const Tensor<T>& y, T slope);
template <class T> Tensor<T> tanh(const Tensor<T>& x);
template <class T> Tensor<T> tanh_backward(const Tensor<T>& dy, const Tensor<T>& y);

template <class T> Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b);
// Splits along channels after the first `first_channels` channels.
template <class T>
std::pair<Tensor<T>, Tensor<T>> split_channels(const Tensor<T>& x, int first_channels);
template <class T> Tensor<T> concat_channels(const std::vector<Tensor<T>>& parts);
template <class T>
std::vector<Tensor<T>> split_channels(const Tensor<T>& x, const std::vector<int>& sizes);

template <class T> void add_inplace(Tensor<T>& acc, const Tensor<T>& x);
template <class T> void scale_inplace(Tensor<T>& x, T s);

// Bilinear resampling, half-pixel centres (align_corners = false).
template <class T> Tensor<T> resize_bilinear(const Tensor<T>& x, int h, int w);
template <class T>
Tensor<T> resize_bilinear_backward(const Tensor<T>& dy, int in_h, int in_w);

template <class T> Tensor<T> global_avg_pool(const Tensor<T>& x);
template <class T> Tensor<T> global_avg_pool_backward(const Tensor<T>& dy, int h, int w);
template <class T> Tensor<T> broadcast_spatial(const Tensor<T>& x, int h, int w);
template <class T> Tensor<T> broadcast_spatial_backward(const Tensor<T>& dy);

// Zero-pads at the bottom/right to (h, w); crop keeps the top-left (h, w).
// Each is the adjoint of the other.
template <class T> Tensor<T> pad_bottom_right(const Tensor<T>& x, int h, int w);
template <class T> Tensor<T> crop_top_left(const Tensor<T>& x, int h, int w);

// Per-pixel softmax over channels.
template <class T> Tensor<T> softmax_channels(const Tensor<T>& logits);

}  // namespace snowlens::nn
