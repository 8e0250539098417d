// Compiled with -mavx2 -mfma; only reached through the dispatch table after a
// CPUID check.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "snowlens/simd/kernels.hpp"

namespace snowlens::simd::avx2 {

namespace {

constexpr int kMr = 6;
constexpr int kNr = 16;
constexpr int kKc = 256;
constexpr int kMc = 96;
constexpr int kNc = 3072;

void pack_a(Trans ta, const float* a, int lda, int i0, int mc, int p0, int kc,
            float alpha, float* dst) {
  for (int ir = 0; ir < mc; ir += kMr) {
    const int mr = std::min(kMr, mc - ir);
    if (ta == Trans::no) {
      for (int p = 0; p < kc; ++p) {
        for (int ii = 0; ii < kMr; ++ii) {
          dst[ii] = ii < mr
                        ? alpha * a[static_cast<std::ptrdiff_t>(i0 + ir + ii) * lda + p0 + p]
                        : 0.0f;
        }
        dst += kMr;
      }
    } else {
      for (int p = 0; p < kc; ++p) {
        const float* src = a + static_cast<std::ptrdiff_t>(p0 + p) * lda + i0 + ir;
        for (int ii = 0; ii < kMr; ++ii) dst[ii] = ii < mr ? alpha * src[ii] : 0.0f;
        dst += kMr;
      }
    }
  }
}

void pack_b(Trans tb, const float* b, int ldb, int j0, int nc, int p0, int kc,
            float* dst) {
  for (int jr = 0; jr < nc; jr += kNr) {
    const int nr = std::min(kNr, nc - jr);
    if (tb == Trans::no) {
      for (int p = 0; p < kc; ++p) {
        const float* src = b + static_cast<std::ptrdiff_t>(p0 + p) * ldb + j0 + jr;
        if (nr == kNr) {
          _mm256_storeu_ps(dst, _mm256_loadu_ps(src));
          _mm256_storeu_ps(dst + 8, _mm256_loadu_ps(src + 8));
        } else {
          for (int jj = 0; jj < kNr; ++jj) dst[jj] = jj < nr ? src[jj] : 0.0f;
        }
        dst += kNr;
      }
    } else {
      for (int jj = 0; jj < kNr; ++jj) {
        if (jj < nr) {
          const float* src = b + static_cast<std::ptrdiff_t>(j0 + jr + jj) * ldb + p0;
          for (int p = 0; p < kc; ++p) dst[p * kNr + jj] = src[p];
        } else {
          for (int p = 0; p < kc; ++p) dst[p * kNr + jj] = 0.0f;
        }
      }
      dst += kc * kNr;
    }
  }
}

// C[0:mr, 0:nr] += packed A panel (kc x 6) * packed B panel (kc x 16).
void micro_kernel(int kc, const float* pa, const float* pb, float* c, int ldc,
                  int mr, int nr) {
  __m256 c00 = _mm256_setzero_ps(), c01 = _mm256_setzero_ps();
  __m256 c10 = _mm256_setzero_ps(), c11 = _mm256_setzero_ps();
  __m256 c20 = _mm256_setzero_ps(), c21 = _mm256_setzero_ps();
  __m256 c30 = _mm256_setzero_ps(), c31 = _mm256_setzero_ps();
  __m256 c40 = _mm256_setzero_ps(), c41 = _mm256_setzero_ps();
  __m256 c50 = _mm256_setzero_ps(), c51 = _mm256_setzero_ps();
  for (int p = 0; p < kc; ++p) {
    const __m256 b0 = _mm256_loadu_ps(pb);
    const __m256 b1 = _mm256_loadu_ps(pb + 8);
    __m256 a = _mm256_broadcast_ss(pa + 0);
    c00 = _mm256_fmadd_ps(a, b0, c00);
    c01 = _mm256_fmadd_ps(a, b1, c01);
    a = _mm256_broadcast_ss(pa + 1);
    c10 = _mm256_fmadd_ps(a, b0, c10);
    c11 = _mm256_fmadd_ps(a, b1, c11);
    a = _mm256_broadcast_ss(pa + 2);
    c20 = _mm256_fmadd_ps(a, b0, c20);
    c21 = _mm256_fmadd_ps(a, b1, c21);
    a = _mm256_broadcast_ss(pa + 3);
    c30 = _mm256_fmadd_ps(a, b0, c30);
    c31 = _mm256_fmadd_ps(a, b1, c31);
    a = _mm256_broadcast_ss(pa + 4);
    c40 = _mm256_fmadd_ps(a, b0, c40);
    c41 = _mm256_fmadd_ps(a, b1, c41);
    a = _mm256_broadcast_ss(pa + 5);
    c50 = _mm256_fmadd_ps(a, b0, c50);
    c51 = _mm256_fmadd_ps(a, b1, c51);
    pa += kMr;
    pb += kNr;
  }
  const __m256 acc[kMr][2] = {{c00, c01}, {c10, c11}, {c20, c21},
                              {c30, c31}, {c40, c41}, {c50, c51}};
  if (mr == kMr && nr == kNr) {
    for (int i = 0; i < kMr; ++i) {
      float* row = c + static_cast<std::ptrdiff_t>(i) * ldc;
      _mm256_storeu_ps(row, _mm256_add_ps(_mm256_loadu_ps(row), acc[i][0]));
      _mm256_storeu_ps(row + 8, _mm256_add_ps(_mm256_loadu_ps(row + 8), acc[i][1]));
    }
    return;
  }
  alignas(32) float tmp[kMr][kNr];
  for (int i = 0; i < kMr; ++i) {
    _mm256_store_ps(tmp[i], acc[i][0]);
    _mm256_store_ps(tmp[i] + 8, acc[i][1]);
  }
  for (int i = 0; i < mr; ++i) {
    float* row = c + static_cast<std::ptrdiff_t>(i) * ldc;
    for (int j = 0; j < nr; ++j) row[j] += tmp[i][j];
  }
}

}  // namespace

void sgemm(Trans ta, Trans tb, int m, int n, int k, float alpha, const float* a,
           int lda, const float* b, int ldb, float beta, float* c, int ldc) {
  for (int i = 0; i < m; ++i) {
    float* row = c + static_cast<std::ptrdiff_t>(i) * ldc;
    if (beta == 0.0f) {
      std::fill(row, row + n, 0.0f);
    } else if (beta != 1.0f) {
      const __m256 vb = _mm256_set1_ps(beta);
      int j = 0;
      for (; j + 8 <= n; j += 8)
        _mm256_storeu_ps(row + j, _mm256_mul_ps(vb, _mm256_loadu_ps(row + j)));
      for (; j < n; ++j) row[j] *= beta;
    }
  }
  if (m == 0 || n == 0 || k == 0 || alpha == 0.0f) return;

  thread_local std::vector<float> packed_a;
  thread_local std::vector<float> packed_b;
  packed_a.resize(static_cast<std::size_t>(kMc + kMr) * kKc);
  packed_b.resize(static_cast<std::size_t>(kNc + kNr) * kKc);

  for (int jc = 0; jc < n; jc += kNc) {
    const int nc = std::min(kNc, n - jc);
    for (int pc = 0; pc < k; pc += kKc) {
      const int kc = std::min(kKc, k - pc);
      pack_b(tb, b, ldb, jc, nc, pc, kc, packed_b.data());
      for (int ic = 0; ic < m; ic += kMc) {
        const int mc = std::min(kMc, m - ic);
        pack_a(ta, a, lda, ic, mc, pc, kc, alpha, packed_a.data());
        for (int jr = 0; jr < nc; jr += kNr) {
          const int nr = std::min(kNr, nc - jr);
          const float* pb = packed_b.data() + static_cast<std::ptrdiff_t>(jr / kNr) * kc * kNr;
          for (int ir = 0; ir < mc; ir += kMr) {
            const int mr = std::min(kMr, mc - ir);
            const float* pa = packed_a.data() + static_cast<std::ptrdiff_t>(ir / kMr) * kc * kMr;
            micro_kernel(kc, pa, pb,
                         c + static_cast<std::ptrdiff_t>(ic + ir) * ldc + jc + jr, ldc,
                         mr, nr);
          }
        }
      }
    }
  }
}

void saxpy(std::size_t n, float alpha, const float* x, float* y) {
  const __m256 va = _mm256_set1_ps(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(y + i, _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void adam(std::size_t n, float* param, const float* grad, float* m, float* v,
          const AdamCoeffs& c) {
  const float step = c.lr / c.bias_correction1;
  const float inv_c2 = 1.0f / c.bias_correction2;
  const __m256 b1 = _mm256_set1_ps(c.beta1);
  const __m256 b2 = _mm256_set1_ps(c.beta2);
  const __m256 one_b1 = _mm256_set1_ps(1.0f - c.beta1);
  const __m256 one_b2 = _mm256_set1_ps(1.0f - c.beta2);
  const __m256 vstep = _mm256_set1_ps(step);
  const __m256 vinv = _mm256_set1_ps(inv_c2);
  const __m256 veps = _mm256_set1_ps(c.eps);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 g = _mm256_loadu_ps(grad + i);
    __m256 mi = _mm256_add_ps(_mm256_mul_ps(b1, _mm256_loadu_ps(m + i)), _mm256_mul_ps(one_b1, g));
    __m256 vi = _mm256_add_ps(_mm256_mul_ps(b2, _mm256_loadu_ps(v + i)),
                              _mm256_mul_ps(_mm256_mul_ps(one_b2, g), g));
    _mm256_storeu_ps(m + i, mi);
    _mm256_storeu_ps(v + i, vi);
    const __m256 denom = _mm256_add_ps(_mm256_sqrt_ps(_mm256_mul_ps(vi, vinv)), veps);
    const __m256 upd = _mm256_div_ps(_mm256_mul_ps(vstep, mi), denom);
    _mm256_storeu_ps(param + i, _mm256_sub_ps(_mm256_loadu_ps(param + i), upd));
  }
  for (; i < n; ++i) {
    const float g = grad[i];
    m[i] = c.beta1 * m[i] + (1.0f - c.beta1) * g;
    v[i] = c.beta2 * v[i] + (1.0f - c.beta2) * g * g;
    param[i] -= step * m[i] / (std::sqrt(v[i] * inv_c2) + c.eps);
  }
}

void mask_and(std::size_t n, const std::uint8_t* a, const std::uint8_t* b,
              std::uint8_t* out) {
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), _mm256_and_si256(va, vb));
  }
  for (; i < n; ++i) out[i] = static_cast<std::uint8_t>(a[i] & b[i]);
}

void class_equal(std::size_t n, const std::uint8_t* labels, std::uint8_t cls,
                 std::uint8_t* out) {
  const __m256i target = _mm256_set1_epi8(static_cast<char>(cls));
  const __m256i one = _mm256_set1_epi8(1);
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(labels + i));
    const __m256i eq = _mm256_cmpeq_epi8(v, target);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), _mm256_and_si256(eq, one));
  }
  for (; i < n; ++i) out[i] = labels[i] == cls ? 1 : 0;
}

std::size_t count_nonzero(std::size_t n, const std::uint8_t* bits) {
  const __m256i zero = _mm256_setzero_si256();
  const __m256i one = _mm256_set1_epi8(1);
  __m256i sums = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(bits + i));
    // 0 -> 0, anything else -> 1, then horizontal byte sums into 4 u64 lanes
    const __m256i nz = _mm256_andnot_si256(_mm256_cmpeq_epi8(v, zero), one);
    sums = _mm256_add_epi64(sums, _mm256_sad_epu8(nz, zero));
  }
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), sums);
  std::size_t count = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) count += bits[i] != 0;
  return count;
}

}  // namespace snowlens::simd::avx2
