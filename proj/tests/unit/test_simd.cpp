#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "snowlens/nn/layers.hpp"
#include "snowlens/simd/kernels.hpp"

namespace snowlens::simd {
namespace {

std::vector<float> random_floats(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<float> d(-1.0f, 1.0f);
  std::vector<float> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// Plain triple loop in double precision.
void naive_gemm(Trans ta, Trans tb, int m, int n, int k, double alpha, const float* a, int lda,
                const float* b, int ldb, double beta, std::vector<double>& c, int ldc) {
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0;
      for (int p = 0; p < k; ++p) {
        const double av = ta == Trans::no ? a[i * lda + p] : a[p * lda + i];
        const double bv = tb == Trans::no ? b[p * ldb + j] : b[j * ldb + p];
        s += av * bv;
      }
      c[i * ldc + j] = alpha * s + (beta == 0 ? 0.0 : beta * c[i * ldc + j]);
    }
}

bool avx2_available() { return detected_isa() == Isa::avx2; }

class GemmShapes : public ::testing::TestWithParam<std::tuple<int, int, int, int>> {};

TEST_P(GemmShapes, ScalarAndAvx2MatchReference) {
  const auto [m, n, k, mode] = GetParam();
  const Trans ta = (mode & 1) ? Trans::yes : Trans::no;
  const Trans tb = (mode & 2) ? Trans::yes : Trans::no;
  std::mt19937_64 rng(m * 1000 + n * 10 + k + mode);
  const int lda = ta == Trans::no ? k : m;
  const int ldb = tb == Trans::no ? n : k;
  const auto a = random_floats(static_cast<std::size_t>(m) * k, rng);
  const auto b = random_floats(static_cast<std::size_t>(k) * n, rng);
  const auto c0 = random_floats(static_cast<std::size_t>(m) * n, rng);
  for (float beta : {0.0f, 0.5f}) {
    std::vector<double> ref(c0.begin(), c0.end());
    naive_gemm(ta, tb, m, n, k, 1.25, a.data(), lda, b.data(), ldb, beta, ref, n);
    std::vector<Isa> isas = {Isa::scalar};
    if (avx2_available()) isas.push_back(Isa::avx2);
    std::vector<std::vector<float>> results;
    for (Isa isa : isas) {
      auto c = c0;
      kernels_for(isa).sgemm(ta, tb, m, n, k, 1.25f, a.data(), lda, b.data(), ldb, beta, c.data(), n);
      for (std::size_t i = 0; i < c.size(); ++i)
        ASSERT_NEAR(c[i], ref[i], 1e-5 * (1.0 + k)) << isa_name(isa) << " at " << i;
      results.push_back(c);
    }
    if (results.size() == 2)
      for (std::size_t i = 0; i < results[0].size(); ++i)
        EXPECT_NEAR(results[0][i], results[1][i], 1e-5 * (1.0 + std::abs(ref[i])) * std::sqrt(k + 1.0));
  }
}

INSTANTIATE_TEST_SUITE_P(Shapes, GemmShapes,
                         ::testing::Combine(::testing::Values(1, 7, 16, 33),
                                            ::testing::Values(1, 5, 8, 31, 64),
                                            ::testing::Values(1, 9, 40), ::testing::Values(0, 1, 2, 3)));

TEST(SimdEquivalence, Saxpy) {
  if (!avx2_available()) GTEST_SKIP() << "no AVX2 on this CPU";
  std::mt19937_64 rng(11);
  for (std::size_t n : {0u, 1u, 7u, 8u, 9u, 63u, 1000u}) {
    const auto x = random_floats(n, rng);
    auto y1 = random_floats(n, rng);
    auto y2 = y1;
    kernels_for(Isa::scalar).saxpy(n, 0.7f, x.data(), y1.data());
    kernels_for(Isa::avx2).saxpy(n, 0.7f, x.data(), y2.data());
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-6f);
  }
}

TEST(SimdEquivalence, Adam) {
  if (!avx2_available()) GTEST_SKIP() << "no AVX2 on this CPU";
  std::mt19937_64 rng(12);
  const AdamCoeffs coeffs{1e-3f, 0.9f, 0.999f, 1e-8f, 1 - 0.9f * 0.9f, 1 - 0.999f * 0.999f};
  for (std::size_t n : {1u, 8u, 13u, 257u}) {
    auto p1 = random_floats(n, rng);
    const auto g = random_floats(n, rng);
    auto m1 = random_floats(n, rng);
    auto v1 = random_floats(n, rng);
    for (auto& v : v1) v = std::abs(v);
    auto p2 = p1, m2 = m1, v2 = v1;
    kernels_for(Isa::scalar).adam(n, p1.data(), g.data(), m1.data(), v1.data(), coeffs);
    kernels_for(Isa::avx2).adam(n, p2.data(), g.data(), m2.data(), v2.data(), coeffs);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(p1[i], p2[i], 1e-6f);
      EXPECT_NEAR(m1[i], m2[i], 1e-6f);
      EXPECT_NEAR(v1[i], v2[i], 1e-6f);
    }
  }
}

TEST(SimdEquivalence, AdamScalarMatchesFormula) {
  float p = 0.5f, m = 0.0f, v = 0.0f;
  const float g = 0.2f;
  const AdamCoeffs coeffs{0.1f, 0.9f, 0.999f, 1e-8f, 1 - 0.9f, 1 - 0.999f};
  kernels_for(Isa::scalar).adam(1, &p, &g, &m, &v, coeffs);
  EXPECT_NEAR(m, 0.02f, 1e-7f);
  EXPECT_NEAR(v, 0.001f * 0.04f, 1e-9f);
  // First step moves by lr * sign(g).
  EXPECT_NEAR(p, 0.4f, 1e-6f);
}

TEST(SimdEquivalence, MaskKernelsAreExact) {
  if (!avx2_available()) GTEST_SKIP() << "no AVX2 on this CPU";
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> cls(0, 5), bit(0, 1);
  for (std::size_t n : {0u, 1u, 31u, 32u, 33u, 100u, 4099u}) {
    std::vector<std::uint8_t> labels(n), a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = static_cast<std::uint8_t>(cls(rng));
      a[i] = static_cast<std::uint8_t>(bit(rng));
      b[i] = static_cast<std::uint8_t>(bit(rng));
    }
    std::vector<std::uint8_t> o1(n), o2(n);
    kernels_for(Isa::scalar).mask_and(n, a.data(), b.data(), o1.data());
    kernels_for(Isa::avx2).mask_and(n, a.data(), b.data(), o2.data());
    EXPECT_EQ(o1, o2);
    for (std::uint8_t c = 0; c < 6; ++c) {
      kernels_for(Isa::scalar).class_equal(n, labels.data(), c, o1.data());
      kernels_for(Isa::avx2).class_equal(n, labels.data(), c, o2.data());
      EXPECT_EQ(o1, o2);
      EXPECT_EQ(kernels_for(Isa::scalar).count_nonzero(n, o1.data()),
                kernels_for(Isa::avx2).count_nonzero(n, o2.data()));
    }
  }
}

TEST(SimdDispatch, ForceIsaSwitchesTable) {
  force_isa(Isa::scalar);
  EXPECT_EQ(kernels().isa, Isa::scalar);
  if (avx2_available()) {
    force_isa(Isa::avx2);
    EXPECT_EQ(kernels().isa, Isa::avx2);
  }
  force_isa(detected_isa());
}

TEST(SimdDispatch, ConvolutionAgreesAcrossIsas) {
  if (!avx2_available()) GTEST_SKIP() << "no AVX2 on this CPU";
  std::mt19937_64 rng(14);
  nn::Conv2d<float> conv("c", 5, 7, {3, 2, 1, 1}, true);
  nn::init_normal(conv.weight(), rng, 0.0, 0.3);
  nn::init_normal(conv.bias(), rng, 0.0, 0.3);
  nn::Tensor<float> x(2, 5, 11, 9);
  const auto xs = random_floats(x.size(), rng);
  std::copy(xs.begin(), xs.end(), x.data.begin());
  force_isa(Isa::scalar);
  const auto y1 = conv.forward(x);
  force_isa(Isa::avx2);
  const auto y2 = conv.forward(x);
  force_isa(detected_isa());
  ASSERT_TRUE(y1.same_shape(y2));
  for (std::size_t i = 0; i < y1.size(); ++i) EXPECT_NEAR(y1.data[i], y2.data[i], 1e-5f);
}

TEST(SimdDispatch, DoubleGemmIsExactReference) {
  const double a[] = {1, 2, 3, 4, 5, 6};
  const double b[] = {7, 8, 9, 10, 11, 12};
  double c[4] = {};
  scalar::dgemm(Trans::no, Trans::no, 2, 2, 3, 1.0, a, 3, b, 2, 0.0, c, 2);
  EXPECT_EQ(c[0], 58);
  EXPECT_EQ(c[1], 64);
  EXPECT_EQ(c[2], 139);
  EXPECT_EQ(c[3], 154);
}

}  // namespace
}  // namespace snowlens::simd
