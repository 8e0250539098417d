#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "snowlens/error.hpp"
#include "snowlens/io/image_io.hpp"
#include "snowlens/nn/checkpoint.hpp"
#include "snowlens/nn/functional.hpp"
#include "snowlens/nn/image_tensor.hpp"
#include "snowlens/nn/layers.hpp"
#include "snowlens/nn/loss.hpp"
#include "snowlens/nn/optim.hpp"
#include "test_support.hpp"

namespace snowlens::nn {
namespace {

using D = double;

Tensor<D> random_tensor(int n, int c, int h, int w, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Tensor<D> t(n, c, h, w);
  for (auto& v : t.data) v = d(rng);
  return t;
}

double dot(const Tensor<D>& a, const Tensor<D>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data[i] * b.data[i];
  return s;
}

// Central difference of `loss` with respect to `v`.
double numeric(const std::function<double()>& loss, double& v, double h = 1e-6) {
  const double keep = v;
  v = keep + h;
  const double lp = loss();
  v = keep - h;
  const double lm = loss();
  v = keep;
  return (lp - lm) / (2 * h);
}

void expect_close(double analytic, double num, const std::string& what) {
  const double scale = std::max({std::abs(analytic), std::abs(num), 1e-4});
  EXPECT_LE(std::abs(analytic - num) / scale, 1e-5) << what << ": analytic " << analytic << " numeric " << num;
}

// Checks d/dx and d/dparams of sum(layer(x) * r) at every entry (small layers).
template <class Layer>
void check_layer(Layer& layer, Tensor<D> x, std::mt19937_64& rng) {
  Saved<D> s;
  const auto y = layer.forward_train(x, s);
  const auto r = random_tensor(y.n, y.c, y.h, y.w, rng);
  std::vector<Param<D>*> params;
  layer.collect(params);
  zero_grads(params);
  const auto dx = layer.backward(r, s, true);
  auto loss = [&] {
    Saved<D> tmp;
    return dot(layer.forward_train(x, tmp), r);
  };
  for (std::size_t i = 0; i < x.size(); ++i) expect_close(dx.data[i], numeric(loss, x.data[i]), "dx");
  for (auto* p : params)
    for (std::size_t i = 0; i < p->value.size(); ++i)
      expect_close(p->grad.data[i], numeric(loss, p->value.data[i]), p->name);
}

TEST(GradCheck, Conv2dStridedDilatedBias) {
  std::mt19937_64 rng(1);
  for (ConvGeometry g : {ConvGeometry{3, 1, 1, 1}, ConvGeometry{4, 2, 1, 1}, ConvGeometry{3, 1, 2, 2},
                         ConvGeometry{1, 1, 0, 1}}) {
    Conv2d<D> conv("c", 3, 4, g, true);
    init_normal(conv.weight(), rng, 0.0, 0.5);
    init_normal(conv.bias(), rng, 0.0, 0.5);
    check_layer(conv, random_tensor(2, 3, 6, 5, rng), rng);
  }
}

TEST(GradCheck, ConvTranspose2d) {
  std::mt19937_64 rng(2);
  ConvTranspose2d<D> conv("t", 3, 2, {4, 2, 1, 1}, true);
  init_normal(conv.weight(), rng, 0.0, 0.5);
  init_normal(conv.bias(), rng, 0.0, 0.5);
  const auto x = random_tensor(2, 3, 3, 4, rng);
  Saved<D> s;
  EXPECT_EQ(conv.forward_train(x, s).h, 6);
  check_layer(conv, x, rng);
}

TEST(GradCheck, DepthwiseConv2d) {
  std::mt19937_64 rng(3);
  for (auto [stride, dil] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{1, 2}}) {
    DepthwiseConv2d<D> conv("d", 3, 3, stride, dil);
    init_normal(conv.weight(), rng, 0.0, 0.5);
    check_layer(conv, random_tensor(2, 3, 7, 6, rng), rng);
  }
}

TEST(GradCheck, BatchNormTrainingMode) {
  std::mt19937_64 rng(4);
  BatchNorm2d<D> bn("bn", 3);
  std::vector<Param<D>*> ps;
  bn.collect(ps);
  for (auto* p : ps) init_normal(*p, rng, 1.0, 0.3);
  check_layer(bn, random_tensor(3, 3, 4, 4, rng, 2.0), rng);
}

TEST(GradCheck, InstanceNorm) {
  std::mt19937_64 rng(5);
  InstanceNorm2d<D> in("in", 2);
  std::vector<Param<D>*> ps;
  in.collect(ps);
  for (auto* p : ps) init_normal(*p, rng, 1.0, 0.3);
  check_layer(in, random_tensor(2, 2, 5, 3, rng, 2.0), rng);
}

TEST(BatchNorm, RunningStatisticsAndInference) {
  BatchNorm2d<float> bn("bn", 1, 0.5);
  Tensor<float> x(2, 1, 1, 2);
  x.data = {1, 3, 5, 7};
  Saved<float> s;
  const auto y = bn.forward_train(x, s);
  float mean = 0;
  for (float v : y.data) mean += v;
  EXPECT_NEAR(mean / 4, 0.0f, 1e-6f);
  std::vector<Buffer<float>> bufs;
  bn.collect_buffers(bufs);
  ASSERT_EQ(bufs.size(), 2u);
  EXPECT_NEAR(bufs[0].tensor->data[0], 0.5f * 4.0f, 1e-6f);  // running mean moved halfway to 4
  bn.reset_running_stats();
  bn.set_momentum(-1.0);
  bn.forward_train(x, s);
  EXPECT_NEAR(bufs[0].tensor->data[0], 4.0f, 1e-6f);
  const auto yi = bn.forward(x);
  EXPECT_NEAR(yi.data[0], (1 - 4) / std::sqrt(bufs[1].tensor->data[0] + 1e-5f), 1e-4f);
}

TEST(GradCheck, FunctionalOps) {
  std::mt19937_64 rng(6);
  auto x = random_tensor(2, 3, 4, 5, rng);
  struct Op {
    const char* name;
    std::function<Tensor<D>(const Tensor<D>&)> f;
    std::function<Tensor<D>(const Tensor<D>&, const Tensor<D>&, const Tensor<D>&)> b;  // (dy, x, y)
  };
  const std::vector<Op> ops = {
      {"leaky", [](const Tensor<D>& t) { return leaky_relu(t, 0.2); },
       [](const Tensor<D>& dy, const Tensor<D>&, const Tensor<D>& y) { return leaky_relu_backward(dy, y, 0.2); }},
      {"tanh", [](const Tensor<D>& t) { return nn::tanh(t); },
       [](const Tensor<D>& dy, const Tensor<D>&, const Tensor<D>& y) { return tanh_backward(dy, y); }},
      {"relu", [](const Tensor<D>& t) { return relu(t); },
       [](const Tensor<D>& dy, const Tensor<D>&, const Tensor<D>& y) { return relu_backward(dy, y); }},
      {"bilinear", [](const Tensor<D>& t) { return resize_bilinear(t, 7, 9); },
       [](const Tensor<D>& dy, const Tensor<D>& in, const Tensor<D>&) {
         return resize_bilinear_backward(dy, in.h, in.w);
       }},
      {"bilinear_down", [](const Tensor<D>& t) { return resize_bilinear(t, 3, 2); },
       [](const Tensor<D>& dy, const Tensor<D>& in, const Tensor<D>&) {
         return resize_bilinear_backward(dy, in.h, in.w);
       }},
      {"pool", [](const Tensor<D>& t) { return global_avg_pool(t); },
       [](const Tensor<D>& dy, const Tensor<D>& in, const Tensor<D>&) {
         return global_avg_pool_backward(dy, in.h, in.w);
       }},
      {"pad", [](const Tensor<D>& t) { return pad_bottom_right(t, 6, 8); },
       [](const Tensor<D>& dy, const Tensor<D>& in, const Tensor<D>&) { return crop_top_left(dy, in.h, in.w); }},
  };
  for (const auto& op : ops) {
    const auto y = op.f(x);
    const auto r = random_tensor(y.n, y.c, y.h, y.w, rng);
    const auto dx = op.b(r, x, y);
    auto loss = [&] { return dot(op.f(x), r); };
    for (std::size_t i = 0; i < x.size(); ++i) expect_close(dx.data[i], numeric(loss, x.data[i]), op.name);
  }
}

TEST(Functional, ConcatSplitAndSoftmax) {
  std::mt19937_64 rng(7);
  const auto a = random_tensor(2, 2, 3, 3, rng);
  const auto b = random_tensor(2, 3, 3, 3, rng);
  const auto cat = concat_channels(a, b);
  EXPECT_EQ(cat.c, 5);
  const auto [a2, b2] = split_channels(cat, 2);
  EXPECT_EQ(a2, a);
  EXPECT_EQ(b2, b);
  const auto p = softmax_channels(cat);
  for (int n = 0; n < 2; ++n)
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 3; ++x) {
        double s = 0;
        for (int c = 0; c < 5; ++c) s += p.at(n, c, y, x);
        EXPECT_NEAR(s, 1.0, 1e-12);
      }
  EXPECT_THROW(concat_channels(a, random_tensor(1, 1, 3, 3, rng)), DimensionError);
}

TEST(Loss, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(8);
  auto x = random_tensor(2, 1, 3, 3, rng, 2.0);
  const auto target = random_tensor(2, 1, 3, 3, rng);
  std::vector<std::uint8_t> labels(2 * 3 * 3);
  for (auto& l : labels) l = static_cast<std::uint8_t>(rng() % 4);
  auto logits = random_tensor(2, 4, 3, 3, rng);
  const std::vector<double> weights = {0.5, 2.0, 1.0, 3.0};

  auto check = [&](const char* name, Tensor<D>& in, const std::function<LossResult<D>()>& f) {
    const auto r = f();
    auto loss = [&] { return f().value; };
    for (std::size_t i = 0; i < in.size(); ++i) expect_close(r.grad.data[i], numeric(loss, in.data[i]), name);
  };
  check("bce1", x, [&] { return bce_with_logits(x, 1.0); });
  check("bce0", x, [&] { return bce_with_logits(x, 0.0); });
  check("mse", x, [&] { return mse_to_constant(x, 1.0); });
  check("l1", x, [&] { return l1_loss(x, target); });
  check("ce", logits, [&] { return softmax_cross_entropy(logits, labels); });
  check("ce_weighted", logits, [&] { return softmax_cross_entropy(logits, labels, weights); });
}

TEST(Loss, KnownValues) {
  Tensor<D> z(1, 1, 1, 2, 0.0);
  EXPECT_NEAR(bce_with_logits(z, 1.0).value, std::log(2.0), 1e-12);
  Tensor<D> big(1, 1, 1, 1, 1000.0);
  EXPECT_NEAR(bce_with_logits(big, 1.0).value, 0.0, 1e-12);
  EXPECT_TRUE(std::isfinite(bce_with_logits(big, 0.0).value));
  Tensor<D> a(1, 1, 1, 2), b(1, 1, 1, 2);
  a.data = {1, 2};
  b.data = {2, 2};
  const auto l1 = l1_loss(a, b);
  EXPECT_DOUBLE_EQ(l1.value, 0.5);
  EXPECT_DOUBLE_EQ(l1.grad.data[1], 0.0);
  Tensor<D> logits(1, 3, 1, 1, 0.0);
  const std::vector<std::uint8_t> lab = {2};
  EXPECT_NEAR(softmax_cross_entropy(logits, lab).value, std::log(3.0), 1e-12);
  const std::vector<std::uint8_t> bad = {7};
  EXPECT_THROW(softmax_cross_entropy(logits, bad), ValueError);
}

TEST(Adam, StepMatchesClosedForm) {
  Param<float> p("p", 1, 1, 1, 2);
  p.value.data = {1.0f, -1.0f};
  Adam<float> opt({&p}, {0.01, 0.9, 0.999, 1e-8});
  for (int t = 0; t < 3; ++t) {
    opt.zero_grad();
    p.grad.data = {0.5f, -2.0f};
    opt.step();
  }
  EXPECT_EQ(opt.steps(), 3);
  // Constant gradient: m_hat / sqrt(v_hat) == sign(g), so each step moves lr.
  EXPECT_NEAR(p.value.data[0], 1.0f - 0.03f, 1e-5f);
  EXPECT_NEAR(p.value.data[1], -1.0f + 0.03f, 1e-5f);
}

TEST(Checkpoint, ArchiveRoundTripAndHashVerification) {
  testing::TempDir dir("ckpt");
  TensorArchive ar;
  Tensor<float> t(1, 2, 3, 4);
  for (std::size_t i = 0; i < t.size(); ++i) t.data[i] = 0.25f * static_cast<float>(i);
  ar.put("a/w", t);
  ar.put("b", Tensor<float>(1, 1, 1, 1, 7.0f));
  EXPECT_EQ(TensorArchive::parse(ar.serialize()), ar);

  CheckpointManifest man;
  man.role_tag = "unit";
  man.epoch = 3;
  man.config = {{"k", 1}};
  save_checkpoint(dir / "m.json", ar, man);
  EXPECT_EQ(man.content_hash.size(), 64u);
  EXPECT_EQ(checkpoint_stem(dir / "m.json"), dir / "m");
  const auto loaded = load_checkpoint(dir / "m");
  EXPECT_EQ(loaded.archive, ar);
  EXPECT_EQ(loaded.manifest.epoch, 3);
  EXPECT_EQ(loaded.manifest.role_tag, "unit");

  Tensor<float> wrong(1, 1, 2, 2);
  EXPECT_THROW(loaded.archive.restore("a/w", wrong), DimensionError);
  EXPECT_THROW(loaded.archive.get("missing"), FormatError);

  auto bytes = io::read_file(dir / "m.bin");
  bytes.back() ^= 0x01;
  io::write_file(dir / "m.bin", bytes);
  EXPECT_THROW(load_checkpoint(dir / "m"), FormatError);

  const std::vector<std::uint8_t> junk = {'x', 'y'};
  EXPECT_THROW(TensorArchive::parse(junk), FormatError);
}

TEST(ImageTensor, ByteImagesBecomeSignedUnit) {
  RgbImage img(2, 2, Range::byte, 255.0f);
  img.at(1, 1, 2) = 0.0f;
  const auto t = image_to_tensor(img);
  EXPECT_EQ(t.c, 3);
  EXPECT_FLOAT_EQ(t.at(0, 0, 0, 0), 1.0f);
  EXPECT_FLOAT_EQ(t.at(0, 2, 1, 1), -1.0f);
  const auto back = tensor_to_image(t);
  EXPECT_EQ(back.range(), Range::signed_unit);
  EXPECT_EQ(back.to_byte(), img);
}

}  // namespace
}  // namespace snowlens::nn
