#include "snowlens/simd/kernels.hpp"

#include <cmath>

namespace snowlens::simd::scalar {

namespace {

template <class T>
void gemm_ref(Trans ta, Trans tb, int m, int n, int k, T alpha, const T* a,
              int lda, const T* b, int ldb, T beta, T* c, int ldc) {
  for (int i = 0; i < m; ++i) {
    T* crow = c + static_cast<std::ptrdiff_t>(i) * ldc;
    if (beta == T(0)) {
      for (int j = 0; j < n; ++j) crow[j] = T(0);
    } else if (beta != T(1)) {
      for (int j = 0; j < n; ++j) crow[j] *= beta;
    }
  }
  if (k == 0 || alpha == T(0)) return;
  for (int i = 0; i < m; ++i) {
    T* crow = c + static_cast<std::ptrdiff_t>(i) * ldc;
    for (int p = 0; p < k; ++p) {
      const T av = ta == Trans::no ? a[static_cast<std::ptrdiff_t>(i) * lda + p]
                                   : a[static_cast<std::ptrdiff_t>(p) * lda + i];
      const T s = alpha * av;
      if (tb == Trans::no) {
        const T* brow = b + static_cast<std::ptrdiff_t>(p) * ldb;
        for (int j = 0; j < n; ++j) crow[j] += s * brow[j];
      } else {
        for (int j = 0; j < n; ++j)
          crow[j] += s * b[static_cast<std::ptrdiff_t>(j) * ldb + p];
      }
    }
  }
}

}  // namespace

void sgemm(Trans ta, Trans tb, int m, int n, int k, float alpha, const float* a,
           int lda, const float* b, int ldb, float beta, float* c, int ldc) {
  gemm_ref<float>(ta, tb, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

void dgemm(Trans ta, Trans tb, int m, int n, int k, double alpha,
           const double* a, int lda, const double* b, int ldb, double beta,
           double* c, int ldc) {
  gemm_ref<double>(ta, tb, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

void saxpy(std::size_t n, float alpha, const float* x, float* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void adam(std::size_t n, float* param, const float* grad, float* m, float* v,
          const AdamCoeffs& c) {
  const float step = c.lr / c.bias_correction1;
  const float inv_c2 = 1.0f / c.bias_correction2;
  for (std::size_t i = 0; i < n; ++i) {
    const float g = grad[i];
    m[i] = c.beta1 * m[i] + (1.0f - c.beta1) * g;
    v[i] = c.beta2 * v[i] + (1.0f - c.beta2) * g * g;
    param[i] -= step * m[i] / (std::sqrt(v[i] * inv_c2) + c.eps);
  }
}

void mask_and(std::size_t n, const std::uint8_t* a, const std::uint8_t* b,
              std::uint8_t* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::uint8_t>(a[i] & b[i]);
}

void class_equal(std::size_t n, const std::uint8_t* labels, std::uint8_t cls,
                 std::uint8_t* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = labels[i] == cls ? 1 : 0;
}

std::size_t count_nonzero(std::size_t n, const std::uint8_t* bits) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += bits[i] != 0;
  return count;
}

}  // namespace snowlens::simd::scalar
