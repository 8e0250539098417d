#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "snowlens/nn/tensor.hpp"

namespace snowlens::nn {

struct ConvGeometry {
  int kernel = 3;
  int stride = 1;
  int pad = 1;
  int dilation = 1;

  int out_size(int in) const { return (in + 2 * pad - dilation * (kernel - 1) - 1) / stride + 1; }
};

// Dense 2-D convolution via im2col + GEMM. Weight layout [cout, cin, k, k].
template <class T>
class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(const std::string& name, int cin, int cout, ConvGeometry geom, bool bias);

  Tensor<T> forward(const Tensor<T>& x) const;
  Tensor<T> forward_train(const Tensor<T>& x, Saved<T>& s) const;
  // Accumulates parameter gradients; returns dL/dx (empty if !want_dx).
  Tensor<T> backward(const Tensor<T>& dy, const Saved<T>& s, bool want_dx = true);

  void collect(std::vector<Param<T>*>& out);
  const ConvGeometry& geometry() const { return geom_; }
  int in_channels() const { return cin_; }
  int out_channels() const { return cout_; }
  Param<T>& weight() { return weight_; }
  bool has_bias() const { return has_bias_; }
  Param<T>& bias() { return bias_; }

 private:
  int cin_ = 0;
  int cout_ = 0;
  ConvGeometry geom_;
  bool has_bias_ = false;
  Param<T> weight_;
  Param<T> bias_;
};

// Transposed convolution (fractionally strided). Weight layout [cin, cout, k, k];
// output size (in - 1) * stride - 2 * pad + kernel.
template <class T>
class ConvTranspose2d {
 public:
  ConvTranspose2d() = default;
  ConvTranspose2d(const std::string& name, int cin, int cout, ConvGeometry geom, bool bias);

  Tensor<T> forward(const Tensor<T>& x) const;
  Tensor<T> forward_train(const Tensor<T>& x, Saved<T>& s) const;
  Tensor<T> backward(const Tensor<T>& dy, const Saved<T>& s, bool want_dx = true);

  void collect(std::vector<Param<T>*>& out);
  int out_size(int in) const { return (in - 1) * geom_.stride - 2 * geom_.pad + geom_.kernel; }
  Param<T>& weight() { return weight_; }
  bool has_bias() const { return has_bias_; }
  Param<T>& bias() { return bias_; }

 private:
  int cin_ = 0;
  int cout_ = 0;
  ConvGeometry geom_;
  bool has_bias_ = false;
  Param<T> weight_;
  Param<T> bias_;
};

// Per-channel 3x3 (or kxk) convolution, no bias; padding keeps "same" size at
// stride 1 for any dilation.
template <class T>
class DepthwiseConv2d {
 public:
  DepthwiseConv2d() = default;
  DepthwiseConv2d(const std::string& name, int channels, int kernel, int stride, int dilation);

  Tensor<T> forward(const Tensor<T>& x) const;
  Tensor<T> forward_train(const Tensor<T>& x, Saved<T>& s) const;
  Tensor<T> backward(const Tensor<T>& dy, const Saved<T>& s, bool want_dx = true);

  void collect(std::vector<Param<T>*>& out);
  Param<T>& weight() { return weight_; }

 private:
  int channels_ = 0;
  ConvGeometry geom_;
  Param<T> weight_;
};

// Batch normalization over (N, H, W) per channel. Training uses batch
// statistics and updates running estimates; forward() uses running
// estimates. momentum < 0 selects a cumulative average (used to recalibrate
// statistics after training).
template <class T>
class BatchNorm2d {
 public:
  BatchNorm2d() = default;
  BatchNorm2d(const std::string& name, int channels, double momentum = 0.1, double eps = 1e-5);

  Tensor<T> forward(const Tensor<T>& x) const;
  Tensor<T> forward_train(const Tensor<T>& x, Saved<T>& s);
  Tensor<T> backward(const Tensor<T>& dy, const Saved<T>& s, bool want_dx = true);

  void collect(std::vector<Param<T>*>& out);
  void collect_buffers(std::vector<Buffer<T>>& out);
  void reset_running_stats();
  void set_momentum(double momentum) { momentum_ = momentum; }

 private:
  int channels_ = 0;
  double momentum_ = 0.1;
  double eps_ = 1e-5;
  std::int64_t batches_seen_ = 0;
  Param<T> gamma_;
  Param<T> beta_;
  Tensor<T> running_mean_;
  Tensor<T> running_var_;
};

// Instance normalization over (H, W) per sample and channel, with affine
// parameters. Identical in training and inference.
template <class T>
class InstanceNorm2d {
 public:
  InstanceNorm2d() = default;
  InstanceNorm2d(const std::string& name, int channels, double eps = 1e-5);

  Tensor<T> forward(const Tensor<T>& x) const;
  Tensor<T> forward_train(const Tensor<T>& x, Saved<T>& s) const;
  Tensor<T> backward(const Tensor<T>& dy, const Saved<T>& s, bool want_dx = true);

  void collect(std::vector<Param<T>*>& out);

 private:
  Tensor<T> normalize(const Tensor<T>& x, Tensor<T>* xhat, std::vector<T>* invstd) const;

  int channels_ = 0;
  double eps_ = 1e-5;
  Param<T> gamma_;
  Param<T> beta_;
};

// Weight initializers.
template <class T>
void init_normal(Param<T>& p, std::mt19937_64& rng, double mean, double stddev);
template <class T>
void init_constant(Param<T>& p, T value);
// He-normal with fan_in = prod(shape[1:]).
template <class T>
void init_kaiming(Param<T>& p, std::mt19937_64& rng);

}  // namespace snowlens::nn
