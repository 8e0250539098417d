#pragma once

#include <cstdint>
#include <vector>

#include "snowlens/nn/tensor.hpp"

namespace snowlens::nn {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <class T>
class Adam {
 public:
  Adam() = default;
  Adam(std::vector<Param<T>*> params, AdamOptions options);

  void zero_grad();
  void step();

  std::int64_t steps() const { return steps_; }
  void set_steps(std::int64_t steps) { steps_ = steps; }
  std::vector<Tensor<T>>& first_moments() { return m_; }
  std::vector<Tensor<T>>& second_moments() { return v_; }
  const std::vector<Param<T>*>& params() const { return params_; }

 private:
  std::vector<Param<T>*> params_;
  AdamOptions options_;
  std::vector<Tensor<T>> m_;
  std::vector<Tensor<T>> v_;
  std::int64_t steps_ = 0;
};

// Zeroes every gradient accumulator.
template <class T>
void zero_grads(const std::vector<Param<T>*>& params) {
  for (auto* p : params) p->grad.zero();
}

}  // namespace snowlens::nn
