#pragma once

// Data-parallel inner loops used by the tensor code and the raster/mask code.
//
// Every kernel has a portable scalar reference in snowlens::simd::scalar and,
// on x86-64, an AVX2+FMA variant in snowlens::simd::avx2. The active table is
// chosen once at startup from CPUID; SNOWLENS_SIMD=scalar forces the reference
// path. Both tables are reachable through kernels_for() so tests can compare
// them directly.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace snowlens::simd {

enum class Isa { scalar, avx2 };

enum class Trans { no, yes };

struct AdamCoeffs {
  float lr;
  float beta1;
  float beta2;
  float eps;
  float bias_correction1;  // 1 - beta1^t
  float bias_correction2;  // 1 - beta2^t
};

using SgemmFn = void (*)(Trans ta, Trans tb, int m, int n, int k, float alpha,
                         const float* a, int lda, const float* b, int ldb,
                         float beta, float* c, int ldc);
using SaxpyFn = void (*)(std::size_t n, float alpha, const float* x, float* y);
using AdamFn = void (*)(std::size_t n, float* param, const float* grad,
                        float* m, float* v, const AdamCoeffs& coeffs);
using MaskAndFn = void (*)(std::size_t n, const std::uint8_t* a,
                           const std::uint8_t* b, std::uint8_t* out);
using ClassEqualFn = void (*)(std::size_t n, const std::uint8_t* labels,
                              std::uint8_t cls, std::uint8_t* out);
using CountNonzeroFn = std::size_t (*)(std::size_t n, const std::uint8_t* bits);

struct Kernels {
  Isa isa;
  // C = alpha * op(A) * op(B) + beta * C, row-major. beta == 0 overwrites C.
  SgemmFn sgemm;
  SaxpyFn saxpy;
  AdamFn adam;
  MaskAndFn mask_and;
  ClassEqualFn class_equal;
  CountNonzeroFn count_nonzero;
};

namespace scalar {
void sgemm(Trans ta, Trans tb, int m, int n, int k, float alpha, const float* a,
           int lda, const float* b, int ldb, float beta, float* c, int ldc);
void dgemm(Trans ta, Trans tb, int m, int n, int k, double alpha,
           const double* a, int lda, const double* b, int ldb, double beta,
           double* c, int ldc);
void saxpy(std::size_t n, float alpha, const float* x, float* y);
void adam(std::size_t n, float* param, const float* grad, float* m, float* v,
          const AdamCoeffs& coeffs);
void mask_and(std::size_t n, const std::uint8_t* a, const std::uint8_t* b,
              std::uint8_t* out);
void class_equal(std::size_t n, const std::uint8_t* labels, std::uint8_t cls,
                 std::uint8_t* out);
std::size_t count_nonzero(std::size_t n, const std::uint8_t* bits);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define SNOWLENS_HAVE_AVX2_KERNELS 1
namespace avx2 {
void sgemm(Trans ta, Trans tb, int m, int n, int k, float alpha, const float* a,
           int lda, const float* b, int ldb, float beta, float* c, int ldc);
void saxpy(std::size_t n, float alpha, const float* x, float* y);
void adam(std::size_t n, float* param, const float* grad, float* m, float* v,
          const AdamCoeffs& coeffs);
void mask_and(std::size_t n, const std::uint8_t* a, const std::uint8_t* b,
              std::uint8_t* out);
void class_equal(std::size_t n, const std::uint8_t* labels, std::uint8_t cls,
                 std::uint8_t* out);
std::size_t count_nonzero(std::size_t n, const std::uint8_t* bits);
}  // namespace avx2
#else
#define SNOWLENS_HAVE_AVX2_KERNELS 0
#endif

// Best ISA the running CPU supports.
Isa detected_isa();

// Table in use; honours SNOWLENS_SIMD and force_isa().
const Kernels& kernels();

// Table for a specific ISA. Requesting an unsupported ISA throws.
const Kernels& kernels_for(Isa isa);

// Pins the active table (tests, benchmarking). Unsupported ISA throws.
void force_isa(Isa isa);

std::string_view isa_name(Isa isa);

// Typed GEMM front end: float goes through the active table, double always
// uses the scalar reference (only the gradient checks run in double).
template <class T>
void gemm(Trans ta, Trans tb, int m, int n, int k, T alpha, const T* a, int lda,
          const T* b, int ldb, T beta, T* c, int ldc);

template <>
inline void gemm<float>(Trans ta, Trans tb, int m, int n, int k, float alpha,
                        const float* a, int lda, const float* b, int ldb,
                        float beta, float* c, int ldc) {
  kernels().sgemm(ta, tb, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

template <>
inline void gemm<double>(Trans ta, Trans tb, int m, int n, int k, double alpha,
                         const double* a, int lda, const double* b, int ldb,
                         double beta, double* c, int ldc) {
  scalar::dgemm(ta, tb, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

}  // namespace snowlens::simd
