#include "snowlens/nn/optim.hpp"

#include <cmath>

#include "snowlens/simd/kernels.hpp"

namespace snowlens::nn {

template <class T>
Adam<T>::Adam(std::vector<Param<T>*> params, AdamOptions options)
    : params_(std::move(params)), options_(options) {
  for (auto* p : params_) {
    m_.emplace_back(p->value.n, p->value.c, p->value.h, p->value.w);
    v_.emplace_back(p->value.n, p->value.c, p->value.h, p->value.w);
  }
}

template <class T>
void Adam<T>::zero_grad() {
  zero_grads(params_);
}

template <>
void Adam<float>::step() {
  ++steps_;
  const simd::AdamCoeffs coeffs{
      float(options_.lr),
      float(options_.beta1),
      float(options_.beta2),
      float(options_.eps),
      float(1.0 - std::pow(options_.beta1, double(steps_))),
      float(1.0 - std::pow(options_.beta2, double(steps_))),
  };
  const auto& k = simd::kernels();
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto* p = params_[i];
    k.adam(p->value.size(), p->value.data.data(), p->grad.data.data(), m_[i].data.data(),
           v_[i].data.data(), coeffs);
  }
}

template <>
void Adam<double>::step() {
  ++steps_;
  const double c1 = 1.0 - std::pow(options_.beta1, double(steps_));
  const double c2 = 1.0 - std::pow(options_.beta2, double(steps_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto* p = params_[i];
    for (std::size_t j = 0; j < p->value.size(); ++j) {
      const double g = p->grad.data[j];
      double& m = m_[i].data[j];
      double& v = v_[i].data[j];
      m = options_.beta1 * m + (1 - options_.beta1) * g;
      v = options_.beta2 * v + (1 - options_.beta2) * g * g;
      p->value.data[j] -= options_.lr * (m / c1) / (std::sqrt(v / c2) + options_.eps);
    }
  }
}

template class Adam<float>;
template class Adam<double>;

}  // namespace snowlens::nn
