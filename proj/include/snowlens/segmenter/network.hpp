#pragma once

#include <random>
#include <vector>

#include "snowlens/nn/layers.hpp"
#include "snowlens/segmenter/config.hpp"

namespace snowlens::segmenter {

using nn::Buffer;
using nn::Param;
using nn::Saved;
using nn::Tensor;

enum class Act { none, relu, relu6 };

// conv -> batch norm -> activation. Conv is Conv2d or DepthwiseConv2d.
template <class T, class Conv>
struct ConvUnit {
  struct Trace {
    Saved<T> conv, bn;
    Tensor<T> y;
  };
  Conv conv;
  nn::BatchNorm2d<T> bn;
  Act act = Act::relu;

  Tensor<T> forward(const Tensor<T>& x) const;
  Tensor<T> forward_train(const Tensor<T>& x, Trace& tr);
  Tensor<T> backward(const Tensor<T>& dy, const Trace& tr, bool want_dx);
  void collect(std::vector<Param<T>*>& out);
  void collect_buffers(std::vector<Buffer<T>>& out) { bn.collect_buffers(out); }
};

// MobileNetV2 inverted residual: optional 1x1 expansion, depthwise 3x3
// (strided or dilated), linear 1x1 projection, identity shortcut when shapes
// allow.
template <class T>
struct InvertedResidual {
  struct Trace {
    typename ConvUnit<T, nn::Conv2d<T>>::Trace expand, project;
    typename ConvUnit<T, nn::DepthwiseConv2d<T>>::Trace depthwise;
  };
  bool has_expand = false;
  bool residual = false;
  ConvUnit<T, nn::Conv2d<T>> expand;
  ConvUnit<T, nn::DepthwiseConv2d<T>> depthwise;
  ConvUnit<T, nn::Conv2d<T>> project;

  Tensor<T> forward(const Tensor<T>& x) const;
  Tensor<T> forward_train(const Tensor<T>& x, Trace& tr);
  Tensor<T> backward(const Tensor<T>& dy, const Trace& tr);
  void collect(std::vector<Param<T>*>& out);
  void collect_buffers(std::vector<Buffer<T>>& out);
};

// Encoder-decoder segmenter: inverted-residual backbone with atrous blocks
// reaching the configured output stride, atrous spatial pyramid pooling with
// an image-pooling branch, and a decoder fusing the stride-4 feature. Inputs
// of any size are zero-padded bottom/right to a multiple of the output
// stride; logits are bilinearly upsampled and cropped back to the input size.
template <class T>
class DeepLabV3Plus {
 public:
  struct Trace;

  DeepLabV3Plus() = default;
  // Seeded: identical config gives identical parameters.
  explicit DeepLabV3Plus(const SegmenterConfig& cfg);

  // Logits N x 6 x H x W; batch norm uses running statistics.
  Tensor<T> forward(const Tensor<T>& x) const;
  // Batch statistics; updates running statistics.
  Tensor<T> forward_train(const Tensor<T>& x, Trace& tr);
  void backward(const Tensor<T>& dlogits, const Trace& tr);

  void collect(std::vector<Param<T>*>& out);
  void collect_buffers(std::vector<Buffer<T>>& out);
  std::vector<Param<T>*> params();
  std::vector<Buffer<T>> buffers();

  // Momentum < 0 switches the running statistics to a cumulative average.
  void set_bn_momentum(double momentum);
  void reset_bn_statistics();

  const SegmenterConfig& config() const { return cfg_; }
  // Channels / spatial size of the backbone output for an input size.
  int backbone_channels() const { return backbone_out_; }
  int feature_size(int input) const;

 private:
  Tensor<T> run(const Tensor<T>& x, Trace* tr);
  template <class F>
  void for_each_bn(F&& f);

  SegmenterConfig cfg_;
  int backbone_out_ = 0;
  int low_index_ = -1;
  ConvUnit<T, nn::Conv2d<T>> stem_;
  std::vector<InvertedResidual<T>> blocks_;
  ConvUnit<T, nn::Conv2d<T>> aspp_1x1_;
  std::vector<ConvUnit<T, nn::Conv2d<T>>> aspp_atrous_;
  nn::Conv2d<T> aspp_pool_conv_;
  ConvUnit<T, nn::Conv2d<T>> aspp_project_;
  ConvUnit<T, nn::Conv2d<T>> low_project_;
  ConvUnit<T, nn::Conv2d<T>> decoder1_;
  ConvUnit<T, nn::Conv2d<T>> decoder2_;
  nn::Conv2d<T> classifier_;
};

template <class T>
struct DeepLabV3Plus<T>::Trace {
  int in_h = 0, in_w = 0, pad_h = 0, pad_w = 0;
  typename ConvUnit<T, nn::Conv2d<T>>::Trace stem;
  std::vector<typename InvertedResidual<T>::Trace> blocks;
  int feat_h = 0, feat_w = 0, low_h = 0, low_w = 0;
  typename ConvUnit<T, nn::Conv2d<T>>::Trace aspp_1x1;
  std::vector<typename ConvUnit<T, nn::Conv2d<T>>::Trace> aspp_atrous;
  Saved<T> pool_conv;
  Tensor<T> pool_act;
  typename ConvUnit<T, nn::Conv2d<T>>::Trace aspp_project, low_project, decoder1, decoder2;
  Saved<T> classifier;
  int aspp_c = 0;
};

// make_divisible(v, 8) of the reference MobileNetV2 width rounding.
int round_channels(double v);

}  // namespace snowlens::segmenter
