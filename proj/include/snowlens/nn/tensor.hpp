#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "snowlens/error.hpp"

namespace snowlens::nn {

// Dense NCHW tensor. T is float for training/inference and double for the
// finite-difference gradient checks.
template <class T>
struct Tensor {
  int n = 0;
  int c = 0;
  int h = 0;
  int w = 0;
  std::vector<T> data;

  Tensor() = default;
  Tensor(int n_, int c_, int h_, int w_, T fill = T(0))
      : n(n_), c(c_), h(h_), w(w_),
        data(static_cast<std::size_t>(n_) * c_ * h_ * w_, fill) {}

  std::size_t size() const { return data.size(); }
  std::size_t plane() const { return static_cast<std::size_t>(h) * w; }
  std::size_t sample_size() const { return static_cast<std::size_t>(c) * h * w; }

  T* sample(int i) { return data.data() + static_cast<std::size_t>(i) * sample_size(); }
  const T* sample(int i) const { return data.data() + static_cast<std::size_t>(i) * sample_size(); }
  T* channel(int i, int ch) { return sample(i) + static_cast<std::size_t>(ch) * plane(); }
  const T* channel(int i, int ch) const { return sample(i) + static_cast<std::size_t>(ch) * plane(); }

  T& at(int in, int ic, int y, int x) {
    return data[((static_cast<std::size_t>(in) * c + ic) * h + y) * w + x];
  }
  T at(int in, int ic, int y, int x) const {
    return data[((static_cast<std::size_t>(in) * c + ic) * h + y) * w + x];
  }

  bool same_shape(const Tensor& o) const { return n == o.n && c == o.c && h == o.h && w == o.w; }
  void zero() { std::fill(data.begin(), data.end(), T(0)); }

  std::string shape_str() const {
    return "[" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," +
           std::to_string(w) + "]";
  }
};

template <class T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* what) {
  if (!a.same_shape(b))
    throw DimensionError(std::string(what) + ": shape " + a.shape_str() + " vs " + b.shape_str());
}

// Converts between tensor element types (used to mirror float models into
// double for gradient checks).
template <class To, class From>
Tensor<To> tensor_cast(const Tensor<From>& src) {
  Tensor<To> out(src.n, src.c, src.h, src.w);
  std::transform(src.data.begin(), src.data.end(), out.data.begin(),
                 [](From v) { return static_cast<To>(v); });
  return out;
}

// Trainable tensor and its gradient accumulator.
template <class T>
struct Param {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;

  Param() = default;
  Param(std::string name_, int n, int c, int h, int w)
      : name(std::move(name_)), value(n, c, h, w), grad(n, c, h, w) {}
};

// Non-trainable persistent tensor (normalization running statistics).
template <class T>
struct Buffer {
  std::string name;
  Tensor<T>* tensor;
};

// Per-layer record kept by a training forward pass for the matching backward.
template <class T>
struct Saved {
  Tensor<T> x;
  Tensor<T> y;
  std::vector<T> aux;
};

}  // namespace snowlens::nn
