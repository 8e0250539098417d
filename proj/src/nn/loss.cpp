#include "snowlens/nn/loss.hpp"

#include <algorithm>
#include <cmath>

namespace snowlens::nn {

template <class T>
LossResult<T> bce_with_logits(const Tensor<T>& logits, T target) {
  LossResult<T> r;
  r.grad = Tensor<T>(logits.n, logits.c, logits.h, logits.w);
  const double inv = 1.0 / double(logits.size());
  double sum = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double x = logits.data[i];
    sum += std::max(x, 0.0) - x * double(target) + std::log1p(std::exp(-std::abs(x)));
    const double sig = 1.0 / (1.0 + std::exp(-x));
    r.grad.data[i] = T((sig - double(target)) * inv);
  }
  r.value = sum * inv;
  return r;
}

template <class T>
LossResult<T> mse_to_constant(const Tensor<T>& x, T target) {
  LossResult<T> r;
  r.grad = Tensor<T>(x.n, x.c, x.h, x.w);
  const double inv = 1.0 / double(x.size());
  double sum = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = double(x.data[i]) - double(target);
    sum += d * d;
    r.grad.data[i] = T(2.0 * d * inv);
  }
  r.value = sum * inv;
  return r;
}

template <class T>
LossResult<T> l1_loss(const Tensor<T>& pred, const Tensor<T>& target) {
  require_same_shape(pred, target, "l1_loss");
  LossResult<T> r;
  r.grad = Tensor<T>(pred.n, pred.c, pred.h, pred.w);
  const double inv = 1.0 / double(pred.size());
  double sum = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = double(pred.data[i]) - double(target.data[i]);
    sum += std::abs(d);
    r.grad.data[i] = T(d > 0 ? inv : (d < 0 ? -inv : 0.0));
  }
  r.value = sum * inv;
  return r;
}

template <class T>
LossResult<T> softmax_cross_entropy(const Tensor<T>& logits, std::span<const std::uint8_t> labels,
                                    std::span<const double> class_weights) {
  const std::size_t plane = logits.plane();
  if (labels.size() != static_cast<std::size_t>(logits.n) * plane)
    throw DimensionError("softmax_cross_entropy: label count does not match logits");
  if (!class_weights.empty() && class_weights.size() != static_cast<std::size_t>(logits.c))
    throw DimensionError("softmax_cross_entropy: one weight per class required");
  LossResult<T> r;
  r.grad = Tensor<T>(logits.n, logits.c, logits.h, logits.w);
  std::vector<double> prob(static_cast<std::size_t>(logits.c));
  double total_weight = 0;
  double sum = 0;
  for (int n = 0; n < logits.n; ++n) {
    for (std::size_t i = 0; i < plane; ++i) {
      const int y = labels[static_cast<std::size_t>(n) * plane + i];
      if (y >= logits.c) throw ValueError("label index exceeds class count");
      double mx = logits.channel(n, 0)[i];
      for (int c = 1; c < logits.c; ++c) mx = std::max(mx, double(logits.channel(n, c)[i]));
      double z = 0;
      for (int c = 0; c < logits.c; ++c) {
        prob[c] = std::exp(double(logits.channel(n, c)[i]) - mx);
        z += prob[c];
      }
      const double wgt = class_weights.empty() ? 1.0 : class_weights[y];
      sum += wgt * (std::log(z) - (double(logits.channel(n, y)[i]) - mx));
      total_weight += wgt;
      for (int c = 0; c < logits.c; ++c) {
        const double p = prob[c] / z;
        r.grad.channel(n, c)[i] = T(wgt * (p - (c == y ? 1.0 : 0.0)));
      }
    }
  }
  if (total_weight <= 0) throw ValueError("softmax_cross_entropy: zero total weight");
  r.value = sum / total_weight;
  const T inv = T(1.0 / total_weight);
  for (auto& g : r.grad.data) g *= inv;
  return r;
}

#define SNOWLENS_INSTANTIATE(T)                                                     \
  template LossResult<T> bce_with_logits<T>(const Tensor<T>&, T);                   \
  template LossResult<T> mse_to_constant<T>(const Tensor<T>&, T);                   \
  template LossResult<T> l1_loss<T>(const Tensor<T>&, const Tensor<T>&);            \
  template LossResult<T> softmax_cross_entropy<T>(const Tensor<T>&,                 \
                                                  std::span<const std::uint8_t>,    \
                                                  std::span<const double>);

SNOWLENS_INSTANTIATE(float)
SNOWLENS_INSTANTIATE(double)

#undef SNOWLENS_INSTANTIATE

}  // namespace snowlens::nn
