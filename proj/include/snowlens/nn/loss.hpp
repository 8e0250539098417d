#pragma once

#include <cstdint>
#include <span>

#include "snowlens/nn/tensor.hpp"

namespace snowlens::nn {

template <class T>
struct LossResult {
  double value = 0.0;
  Tensor<T> grad;  // d value / d input
};

// Mean binary cross-entropy of sigmoid(logits) against a constant target,
// computed in the numerically stable max(x,0) - x*t + log(1 + e^-|x|) form.
template <class T>
LossResult<T> bce_with_logits(const Tensor<T>& logits, T target);

// Mean squared error against a constant target (least-squares GAN).
template <class T>
LossResult<T> mse_to_constant(const Tensor<T>& x, T target);

// Mean absolute error. Subgradient 0 where pred == target.
template <class T>
LossResult<T> l1_loss(const Tensor<T>& pred, const Tensor<T>& target);

// Per-pixel softmax cross-entropy. labels hold N*H*W class indices in NHW
// order. With class weights the loss is the weighted mean
// sum(w_y * nll) / sum(w_y).
template <class T>
LossResult<T> softmax_cross_entropy(const Tensor<T>& logits, std::span<const std::uint8_t> labels,
                                    std::span<const double> class_weights = {});

}  // namespace snowlens::nn
