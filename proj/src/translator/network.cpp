#include "snowlens/translator/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "snowlens/nn/functional.hpp"

namespace snowlens::translator {

namespace {

constexpr double kSlope = 0.2;
const nn::ConvGeometry kDown{4, 2, 1, 1};
const nn::ConvGeometry kStride1{4, 1, 1, 1};

template <class T>
void init_layer_params(std::vector<Param<T>*> params, std::mt19937_64& rng, double stddev) {
  for (auto* p : params) {
    const auto& n = p->name;
    if (n.ends_with(".weight")) nn::init_normal(*p, rng, 0.0, stddev);
    else if (n.ends_with(".gamma")) nn::init_normal(*p, rng, 1.0, stddev);
    else nn::init_constant(*p, T(0));
  }
}

template <class L, class T>
std::vector<Param<T>*> params_of(L& layer) {
  std::vector<Param<T>*> out;
  layer.collect(out);
  return out;
}

}  // namespace

// ------------------------------------------------------------- generator

template <class T>
UNetGenerator<T>::UNetGenerator(const TranslatorConfig& cfg, std::mt19937_64& rng)
    : depth_(cfg.depth) {
  cfg.validate();
  for (int i = 0; i < depth_; ++i) channels_.push_back(cfg.gen_channels * std::min(1 << i, 8));
  down_norm_.resize(depth_);
  up_norm_.resize(depth_);
  for (int i = 0; i < depth_; ++i) {
    const std::string tag = "G.level" + std::to_string(i);
    const int in_c = i == 0 ? 3 : channels_[i - 1];
    const int out_c = i == 0 ? 3 : channels_[i - 1];
    const int up_in = i == depth_ - 1 ? channels_[i] : 2 * channels_[i];
    down_.emplace_back(tag + ".down", in_c, channels_[i], kDown, true);
    up_.emplace_back(tag + ".up", up_in, out_c, kDown, true);
    if (has_down_norm(i)) down_norm_[i] = nn::InstanceNorm2d<T>(tag + ".down_norm", channels_[i]);
    if (i > 0) up_norm_[i] = nn::InstanceNorm2d<T>(tag + ".up_norm", out_c);
  }
  // Initialization order is fixed by level so a seed reproduces the weights.
  for (int i = 0; i < depth_; ++i) {
    init_layer_params<T>(params_of<nn::Conv2d<T>, T>(down_[i]), rng, cfg.init_std);
    if (has_down_norm(i))
      init_layer_params<T>(params_of<nn::InstanceNorm2d<T>, T>(down_norm_[i]), rng, cfg.init_std);
    init_layer_params<T>(params_of<nn::ConvTranspose2d<T>, T>(up_[i]), rng, cfg.init_std);
    if (i > 0)
      init_layer_params<T>(params_of<nn::InstanceNorm2d<T>, T>(up_norm_[i]), rng, cfg.init_std);
  }
}

template <class T>
Tensor<T> UNetGenerator<T>::run(const Tensor<T>& x, Trace* tr) const {
  if (x.c != 3) throw DimensionError("generator expects 3 input channels, got " + x.shape_str());
  const int mult = 1 << depth_;
  if (x.h % mult != 0 || x.w % mult != 0)
    throw DimensionError("generator input " + x.shape_str() + " must have sides divisible by " +
                         std::to_string(mult));
  if (tr) {
    tr->down_conv.assign(depth_, {});
    tr->down_norm.assign(depth_, {});
    tr->up_conv.assign(depth_, {});
    tr->up_norm.assign(depth_, {});
    tr->down_act.assign(depth_, {});
    tr->up_act.assign(depth_, {});
  }
  std::vector<Tensor<T>> xs(depth_ + 1);
  xs[0] = x;
  for (int i = 0; i < depth_; ++i) {
    Tensor<T> a = i == 0 ? xs[0] : nn::leaky_relu(xs[i], T(kSlope));
    Tensor<T> d = tr ? down_[i].forward_train(a, tr->down_conv[i]) : down_[i].forward(a);
    if (tr && i > 0) tr->down_act[i] = std::move(a);
    if (has_down_norm(i))
      d = tr ? down_norm_[i].forward_train(d, tr->down_norm[i]) : down_norm_[i].forward(d);
    xs[i + 1] = std::move(d);
  }
  Tensor<T> up_out;
  for (int i = depth_ - 1; i >= 0; --i) {
    Tensor<T> r = nn::relu(i == depth_ - 1 ? xs[depth_] : nn::concat_channels(xs[i + 1], up_out));
    Tensor<T> c = tr ? up_[i].forward_train(r, tr->up_conv[i]) : up_[i].forward(r);
    if (tr) tr->up_act[i] = std::move(r);
    if (i == 0) {
      Tensor<T> out = nn::tanh(c);
      if (tr) tr->out = out;
      return out;
    }
    up_out = tr ? up_norm_[i].forward_train(c, tr->up_norm[i]) : up_norm_[i].forward(c);
  }
  return {};
}

template <class T>
Tensor<T> UNetGenerator<T>::forward(const Tensor<T>& x) const {
  return run(x, nullptr);
}

template <class T>
Tensor<T> UNetGenerator<T>::forward_train(const Tensor<T>& x, Trace& tr) const {
  return run(x, &tr);
}

template <class T>
Tensor<T> UNetGenerator<T>::backward(const Tensor<T>& dy, const Trace& tr, bool want_dx) {
  std::vector<Tensor<T>> dxs(depth_ + 1);
  Tensor<T> d_up_out;
  for (int i = 0; i < depth_; ++i) {
    Tensor<T> dc = i == 0 ? nn::tanh_backward(dy, tr.out)
                          : up_norm_[i].backward(d_up_out, tr.up_norm[i]);
    Tensor<T> dr = up_[i].backward(dc, tr.up_conv[i], true);
    Tensor<T> du = nn::relu_backward(dr, tr.up_act[i]);
    if (i == depth_ - 1) {
      nn::add_inplace(dxs[depth_], du);
    } else {
      auto [skip, inner] = nn::split_channels(du, channels_[i]);
      nn::add_inplace(dxs[i + 1], skip);
      d_up_out = std::move(inner);
    }
  }
  Tensor<T> dx;
  for (int i = depth_ - 1; i >= 0; --i) {
    Tensor<T> dd = std::move(dxs[i + 1]);
    if (has_down_norm(i)) dd = down_norm_[i].backward(dd, tr.down_norm[i]);
    Tensor<T> da = down_[i].backward(dd, tr.down_conv[i], i > 0 || want_dx);
    if (i > 0) nn::add_inplace(dxs[i], nn::leaky_relu_backward(da, tr.down_act[i], T(kSlope)));
    else dx = std::move(da);
  }
  return dx;
}

template <class T>
void UNetGenerator<T>::collect(std::vector<Param<T>*>& out) {
  for (int i = 0; i < depth_; ++i) {
    down_[i].collect(out);
    if (has_down_norm(i)) down_norm_[i].collect(out);
    up_[i].collect(out);
    if (i > 0) up_norm_[i].collect(out);
  }
}

// --------------------------------------------------------- discriminator

template <class T>
PatchDiscriminator<T>::PatchDiscriminator(const TranslatorConfig& cfg, std::mt19937_64& rng) {
  const int layers = cfg.disc_layers;
  int prev = 6;
  for (int j = 0; j <= layers + 1; ++j) {
    const std::string tag = "D.layer" + std::to_string(j);
    const int out = j == layers + 1 ? 1 : cfg.disc_channels * std::min(1 << j, 8);
    conv_.emplace_back(tag + ".conv", prev, out, j < layers ? kDown : kStride1, true);
    norm_.emplace_back();
    if (j > 0 && j <= layers) norm_.back() = nn::InstanceNorm2d<T>(tag + ".norm", out);
    prev = out;
  }
  for (std::size_t j = 0; j < conv_.size(); ++j) {
    init_layer_params<T>(params_of<nn::Conv2d<T>, T>(conv_[j]), rng, cfg.init_std);
    if (has_norm(static_cast<int>(j)))
      init_layer_params<T>(params_of<nn::InstanceNorm2d<T>, T>(norm_[j]), rng, cfg.init_std);
  }
}

template <class T>
Tensor<T> PatchDiscriminator<T>::run(const Tensor<T>& x, Trace* tr) const {
  const int n = static_cast<int>(conv_.size());
  if (tr) {
    tr->conv.assign(n, {});
    tr->norm.assign(n, {});
    tr->act.assign(n, {});
  }
  Tensor<T> h = x;
  for (int j = 0; j < n; ++j) {
    h = tr ? conv_[j].forward_train(h, tr->conv[j]) : conv_[j].forward(h);
    if (has_norm(j)) h = tr ? norm_[j].forward_train(h, tr->norm[j]) : norm_[j].forward(h);
    if (j < n - 1) {
      h = nn::leaky_relu(h, T(kSlope));
      if (tr) tr->act[j] = h;
    }
  }
  return h;
}

template <class T>
Tensor<T> PatchDiscriminator<T>::forward(const Tensor<T>& pair) const {
  return run(pair, nullptr);
}

template <class T>
Tensor<T> PatchDiscriminator<T>::forward_train(const Tensor<T>& pair, Trace& tr) const {
  return run(pair, &tr);
}

template <class T>
Tensor<T> PatchDiscriminator<T>::backward(const Tensor<T>& dy, const Trace& tr, bool want_dx) {
  const int n = static_cast<int>(conv_.size());
  Tensor<T> g = dy;
  for (int j = n - 1; j >= 0; --j) {
    if (j < n - 1) g = nn::leaky_relu_backward(g, tr.act[j], T(kSlope));
    if (has_norm(j)) g = norm_[j].backward(g, tr.norm[j]);
    g = conv_[j].backward(g, tr.conv[j], j > 0 || want_dx);
  }
  return g;
}

template <class T>
void PatchDiscriminator<T>::collect(std::vector<Param<T>*>& out) {
  for (std::size_t j = 0; j < conv_.size(); ++j) {
    conv_[j].collect(out);
    if (has_norm(static_cast<int>(j))) norm_[j].collect(out);
  }
}

// ----------------------------------------------------------------- model

std::pair<int, int> patch_grid(const TranslatorConfig& cfg) {
  int h = cfg.height;
  int w = cfg.width;
  for (int j = 0; j <= cfg.disc_layers + 1; ++j) {
    const auto& g = j < cfg.disc_layers ? kDown : kStride1;
    h = g.out_size(h);
    w = g.out_size(w);
  }
  return {h, w};
}

template <class T>
TranslatorModel<T>::TranslatorModel(const TranslatorConfig& cfg) : config(cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  generator = UNetGenerator<T>(cfg, rng);
  discriminator = PatchDiscriminator<T>(cfg, rng);
}

template <class T>
std::vector<Param<T>*> TranslatorModel<T>::generator_params() {
  std::vector<Param<T>*> out;
  generator.collect(out);
  return out;
}

template <class T>
std::vector<Param<T>*> TranslatorModel<T>::discriminator_params() {
  std::vector<Param<T>*> out;
  discriminator.collect(out);
  return out;
}

// ---------------------------------------------------------------- losses

template <class T>
nn::LossResult<T> gan_criterion(const Tensor<T>& logits, bool real, GanMode mode) {
  const T target = real ? T(1) : T(0);
  return mode == GanMode::bce ? nn::bce_with_logits(logits, target)
                              : nn::mse_to_constant(logits, target);
}

namespace {

// Copies samples [from, from + count) of a batch.
template <class T>
Tensor<T> batch_slice(const Tensor<T>& x, int from, int count) {
  Tensor<T> out(count, x.c, x.h, x.w);
  std::copy(x.sample(from), x.sample(from) + out.size(), out.data.begin());
  return out;
}

template <class T>
Tensor<T> batch_concat(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(batch_slice(a, 0, 1), batch_slice(b, 0, 1), "batch_concat");
  Tensor<T> out(a.n + b.n, a.c, a.h, a.w);
  std::copy(a.data.begin(), a.data.end(), out.data.begin());
  std::copy(b.data.begin(), b.data.end(), out.data.begin() + static_cast<std::ptrdiff_t>(a.size()));
  return out;
}

}  // namespace

template <class T>
GanLossTerms translator_loss(const TranslatorModel<T>& m, const Tensor<T>& condition,
                             const Tensor<T>& target) {
  require_same_shape(condition, target, "translator_loss");
  const Tensor<T> fake = m.generator.forward(condition);
  const Tensor<T> real_logits = m.discriminator.forward(nn::concat_channels(condition, target));
  const Tensor<T> fake_logits = m.discriminator.forward(nn::concat_channels(condition, fake));
  GanLossTerms t;
  t.d_real = gan_criterion(real_logits, true, m.config.gan_mode).value;
  t.d_fake = gan_criterion(fake_logits, false, m.config.gan_mode).value;
  t.d_total = 0.5 * (t.d_real + t.d_fake);
  t.g_gan = gan_criterion(fake_logits, true, m.config.gan_mode).value;
  t.g_l1 = nn::l1_loss(fake, target).value;
  t.g_total = t.g_gan + m.config.lambda_l1 * t.g_l1;
  return t;
}

template <class T>
GanLossTerms discriminator_backward(TranslatorModel<T>& m, const Tensor<T>& condition,
                                    const Tensor<T>& target, const Tensor<T>& fake) {
  require_same_shape(condition, target, "discriminator_backward");
  require_same_shape(condition, fake, "discriminator_backward");
  const int b = condition.n;
  const Tensor<T> pairs = batch_concat(nn::concat_channels(condition, target),
                                       nn::concat_channels(condition, fake));
  typename PatchDiscriminator<T>::Trace tr;
  const Tensor<T> logits = m.discriminator.forward_train(pairs, tr);
  auto real = gan_criterion(batch_slice(logits, 0, b), true, m.config.gan_mode);
  auto fk = gan_criterion(batch_slice(logits, b, b), false, m.config.gan_mode);
  Tensor<T> grad(logits.n, logits.c, logits.h, logits.w);
  for (std::size_t i = 0; i < real.grad.size(); ++i) grad.data[i] = T(0.5) * real.grad.data[i];
  for (std::size_t i = 0; i < fk.grad.size(); ++i)
    grad.data[real.grad.size() + i] = T(0.5) * fk.grad.data[i];
  m.discriminator.backward(grad, tr, false);
  GanLossTerms t;
  t.d_real = real.value;
  t.d_fake = fk.value;
  t.d_total = 0.5 * (t.d_real + t.d_fake);
  return t;
}

template <class T>
GanLossTerms generator_backward(TranslatorModel<T>& m, const Tensor<T>& condition,
                                const Tensor<T>& target, const Tensor<T>& fake,
                                const typename UNetGenerator<T>::Trace& gtr) {
  require_same_shape(condition, target, "generator_backward");
  typename PatchDiscriminator<T>::Trace dtr;
  const Tensor<T> logits = m.discriminator.forward_train(nn::concat_channels(condition, fake), dtr);
  auto adv = gan_criterion(logits, true, m.config.gan_mode);
  auto l1 = nn::l1_loss(fake, target);
  const Tensor<T> dpair = m.discriminator.backward(adv.grad, dtr, true);
  Tensor<T> dfake = nn::split_channels(dpair, 3).second;
  const T lambda = T(m.config.lambda_l1);
  for (std::size_t i = 0; i < dfake.size(); ++i) dfake.data[i] += lambda * l1.grad.data[i];
  m.generator.backward(dfake, gtr, false);
  GanLossTerms t;
  t.g_gan = adv.value;
  t.g_l1 = l1.value;
  t.g_total = t.g_gan + m.config.lambda_l1 * t.g_l1;
  return t;
}

#define SNOWLENS_INSTANTIATE(T)                                                                   \
  template class UNetGenerator<T>;                                                                \
  template class PatchDiscriminator<T>;                                                           \
  template struct TranslatorModel<T>;                                                             \
  template nn::LossResult<T> gan_criterion<T>(const Tensor<T>&, bool, GanMode);                   \
  template GanLossTerms translator_loss<T>(const TranslatorModel<T>&, const Tensor<T>&,           \
                                           const Tensor<T>&);                                     \
  template GanLossTerms discriminator_backward<T>(TranslatorModel<T>&, const Tensor<T>&,          \
                                                  const Tensor<T>&, const Tensor<T>&);            \
  template GanLossTerms generator_backward<T>(TranslatorModel<T>&, const Tensor<T>&,              \
                                              const Tensor<T>&, const Tensor<T>&,                 \
                                              const typename UNetGenerator<T>::Trace&);

SNOWLENS_INSTANTIATE(float)
SNOWLENS_INSTANTIATE(double)

#undef SNOWLENS_INSTANTIATE

}  // namespace snowlens::translator
