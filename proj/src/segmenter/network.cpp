#include "snowlens/segmenter/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "snowlens/nn/functional.hpp"

namespace snowlens::segmenter {

namespace {

struct StageSpec {
  int expand;
  int channels;
  int repeats;
  int stride;
};

constexpr StageSpec kStages[7] = {{1, 16, 1, 1},  {6, 24, 2, 2},  {6, 32, 3, 2}, {6, 64, 4, 2},
                                  {6, 96, 3, 1},  {6, 160, 3, 2}, {6, 320, 1, 1}};

nn::ConvGeometry pointwise() { return {1, 1, 0, 1}; }
nn::ConvGeometry k3(int stride, int dilation) { return {3, stride, dilation, dilation}; }

template <class T, class Conv>
ConvUnit<T, Conv> make_unit(Conv conv, const std::string& name, int channels, Act act) {
  ConvUnit<T, Conv> u;
  u.conv = std::move(conv);
  u.bn = nn::BatchNorm2d<T>(name + ".bn", channels);
  u.act = act;
  return u;
}

template <class T>
ConvUnit<T, nn::Conv2d<T>> conv_unit(const std::string& name, int cin, int cout,
                                     nn::ConvGeometry g, Act act) {
  return make_unit<T>(nn::Conv2d<T>(name + ".conv", cin, cout, g, false), name, cout, act);
}

template <class T>
Tensor<T> activate(const Tensor<T>& x, Act act) {
  switch (act) {
    case Act::relu: return nn::relu(x);
    case Act::relu6: return nn::relu6(x);
    case Act::none: break;
  }
  return x;
}

template <class T>
Tensor<T> activate_backward(const Tensor<T>& dy, const Tensor<T>& y, Act act) {
  switch (act) {
    case Act::relu: return nn::relu_backward(dy, y);
    case Act::relu6: return nn::relu6_backward(dy, y);
    case Act::none: break;
  }
  return dy;
}

}  // namespace

int round_channels(double v) {
  int r = std::max(8, static_cast<int>(v + 4) / 8 * 8);
  if (r < 0.9 * v) r += 8;
  return r;
}

// ----------------------------------------------------------------- units

template <class T, class Conv>
Tensor<T> ConvUnit<T, Conv>::forward(const Tensor<T>& x) const {
  return activate(bn.forward(conv.forward(x)), act);
}

template <class T, class Conv>
Tensor<T> ConvUnit<T, Conv>::forward_train(const Tensor<T>& x, Trace& tr) {
  tr.y = activate(bn.forward_train(conv.forward_train(x, tr.conv), tr.bn), act);
  return tr.y;
}

template <class T, class Conv>
Tensor<T> ConvUnit<T, Conv>::backward(const Tensor<T>& dy, const Trace& tr, bool want_dx) {
  const Tensor<T> g = bn.backward(activate_backward(dy, tr.y, act), tr.bn, true);
  return conv.backward(g, tr.conv, want_dx);
}

template <class T, class Conv>
void ConvUnit<T, Conv>::collect(std::vector<Param<T>*>& out) {
  conv.collect(out);
  bn.collect(out);
}

template <class T>
Tensor<T> InvertedResidual<T>::forward(const Tensor<T>& x) const {
  Tensor<T> h = has_expand ? expand.forward(x) : x;
  h = project.forward(depthwise.forward(h));
  if (residual) nn::add_inplace(h, x);
  return h;
}

template <class T>
Tensor<T> InvertedResidual<T>::forward_train(const Tensor<T>& x, Trace& tr) {
  Tensor<T> h = has_expand ? expand.forward_train(x, tr.expand) : x;
  h = project.forward_train(depthwise.forward_train(h, tr.depthwise), tr.project);
  if (residual) nn::add_inplace(h, x);
  return h;
}

template <class T>
Tensor<T> InvertedResidual<T>::backward(const Tensor<T>& dy, const Trace& tr) {
  Tensor<T> g = project.backward(dy, tr.project, true);
  g = depthwise.backward(g, tr.depthwise, true);
  if (has_expand) g = expand.backward(g, tr.expand, true);
  if (residual) nn::add_inplace(g, dy);
  return g;
}

template <class T>
void InvertedResidual<T>::collect(std::vector<Param<T>*>& out) {
  if (has_expand) expand.collect(out);
  depthwise.collect(out);
  project.collect(out);
}

template <class T>
void InvertedResidual<T>::collect_buffers(std::vector<Buffer<T>>& out) {
  if (has_expand) expand.collect_buffers(out);
  depthwise.collect_buffers(out);
  project.collect_buffers(out);
}

// ----------------------------------------------------------------- model

template <class T>
DeepLabV3Plus<T>::DeepLabV3Plus(const SegmenterConfig& cfg) : cfg_(cfg) {
  cfg.validate();
  const double a = cfg.width_mult;
  int in_c = round_channels(32 * a);
  stem_ = conv_unit<T>("S.stem", 3, in_c, k3(2, 1), Act::relu6);
  int stride = 2;
  int dilation = 1;
  int index = 0;
  for (int s = 0; s < cfg.backbone_stages; ++s) {
    const auto& st = kStages[s];
    const int out_c = round_channels(st.channels * a);
    for (int r = 0; r < st.repeats; ++r, ++index) {
      int block_stride = r == 0 ? st.stride : 1;
      if (block_stride == 2 && stride >= cfg.output_stride) {
        dilation *= 2;
        block_stride = 1;
      } else if (block_stride == 2) {
        stride *= 2;
      }
      const std::string name = "S.backbone.block" + std::to_string(index);
      const int hidden = in_c * st.expand;
      InvertedResidual<T> b;
      b.has_expand = st.expand != 1;
      b.residual = block_stride == 1 && in_c == out_c;
      if (b.has_expand) b.expand = conv_unit<T>(name + ".expand", in_c, hidden, pointwise(), Act::relu6);
      b.depthwise = make_unit<T>(
          nn::DepthwiseConv2d<T>(name + ".depthwise.conv", hidden, 3, block_stride, dilation),
          name + ".depthwise", hidden, Act::relu6);
      b.project = conv_unit<T>(name + ".project", hidden, out_c, pointwise(), Act::none);
      blocks_.push_back(std::move(b));
      if (stride == 4) low_index_ = index;
      in_c = out_c;
    }
  }
  if (low_index_ < 0) throw ValueError("segmenter backbone never reaches stride 4");
  if (stride != cfg.output_stride)
    throw ValueError("segmenter backbone with " + std::to_string(cfg.backbone_stages) +
                     " stages cannot reach output stride " + std::to_string(cfg.output_stride));
  backbone_out_ = in_c;

  const int ac = cfg.aspp_channels;
  aspp_1x1_ = conv_unit<T>("S.aspp.b0", in_c, ac, pointwise(), Act::relu);
  for (std::size_t i = 0; i < cfg.aspp_rates.size(); ++i) {
    const int r = cfg.aspp_rates[i];
    aspp_atrous_.push_back(
        conv_unit<T>("S.aspp.rate" + std::to_string(r) + "_" + std::to_string(i), in_c, ac, k3(1, r), Act::relu));
  }
  aspp_pool_conv_ = nn::Conv2d<T>("S.aspp.pool.conv", in_c, ac, pointwise(), true);
  const int branches = static_cast<int>(cfg.aspp_rates.size()) + 2;
  aspp_project_ = conv_unit<T>("S.aspp.project", branches * ac, ac, pointwise(), Act::relu);
  const int low_c = blocks_[low_index_].project.conv.out_channels();
  low_project_ = conv_unit<T>("S.decoder.low", low_c, cfg.low_level_channels, pointwise(), Act::relu);
  decoder1_ = conv_unit<T>("S.decoder.conv1", ac + cfg.low_level_channels, cfg.decoder_channels,
                           k3(1, 1), Act::relu);
  decoder2_ = conv_unit<T>("S.decoder.conv2", cfg.decoder_channels, cfg.decoder_channels,
                           k3(1, 1), Act::relu);
  classifier_ = nn::Conv2d<T>("S.classifier", cfg.decoder_channels, cfg.num_classes, pointwise(), true);

  std::mt19937_64 rng(cfg.seed);
  for (auto* p : params()) {
    if (p->name.ends_with(".weight")) nn::init_kaiming(*p, rng);
  }
}

template <class T>
int DeepLabV3Plus<T>::feature_size(int input) const {
  return (input + cfg_.output_stride - 1) / cfg_.output_stride;
}

template <class T>
Tensor<T> DeepLabV3Plus<T>::run(const Tensor<T>& x, Trace* tr) {
  if (x.c != 3) throw DimensionError("segmenter expects 3 input channels, got " + x.shape_str());
  const int os = cfg_.output_stride;
  const int ph = feature_size(x.h) * os;
  const int pw = feature_size(x.w) * os;
  const Tensor<T> xp = nn::pad_bottom_right(x, ph, pw);
  if (tr) {
    tr->in_h = x.h;
    tr->in_w = x.w;
    tr->pad_h = ph;
    tr->pad_w = pw;
    tr->blocks.assign(blocks_.size(), {});
    tr->aspp_atrous.assign(aspp_atrous_.size(), {});
  }

  Tensor<T> f = tr ? stem_.forward_train(xp, tr->stem) : stem_.forward(xp);
  Tensor<T> low;
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    f = tr ? blocks_[k].forward_train(f, tr->blocks[k]) : blocks_[k].forward(f);
    if (static_cast<int>(k) == low_index_) low = f;
  }

  std::vector<Tensor<T>> parts;
  parts.push_back(tr ? aspp_1x1_.forward_train(f, tr->aspp_1x1) : aspp_1x1_.forward(f));
  for (std::size_t i = 0; i < aspp_atrous_.size(); ++i)
    parts.push_back(tr ? aspp_atrous_[i].forward_train(f, tr->aspp_atrous[i])
                       : aspp_atrous_[i].forward(f));
  const Tensor<T> pooled = nn::global_avg_pool(f);
  Tensor<T> g = nn::relu(tr ? aspp_pool_conv_.forward_train(pooled, tr->pool_conv)
                            : aspp_pool_conv_.forward(pooled));
  parts.push_back(nn::broadcast_spatial(g, f.h, f.w));
  if (tr) tr->pool_act = g;
  const Tensor<T> cat = nn::concat_channels(parts);
  const Tensor<T> a = tr ? aspp_project_.forward_train(cat, tr->aspp_project) : aspp_project_.forward(cat);

  const Tensor<T> up = nn::resize_bilinear(a, low.h, low.w);
  const Tensor<T> l = tr ? low_project_.forward_train(low, tr->low_project) : low_project_.forward(low);
  const Tensor<T> fused = nn::concat_channels(up, l);
  Tensor<T> d = tr ? decoder1_.forward_train(fused, tr->decoder1) : decoder1_.forward(fused);
  d = tr ? decoder2_.forward_train(d, tr->decoder2) : decoder2_.forward(d);
  const Tensor<T> logits = tr ? classifier_.forward_train(d, tr->classifier) : classifier_.forward(d);
  if (tr) {
    tr->feat_h = f.h;
    tr->feat_w = f.w;
    tr->low_h = low.h;
    tr->low_w = low.w;
    tr->aspp_c = a.c;
  }
  return nn::crop_top_left(nn::resize_bilinear(logits, ph, pw), x.h, x.w);
}

template <class T>
Tensor<T> DeepLabV3Plus<T>::forward(const Tensor<T>& x) const {
  return const_cast<DeepLabV3Plus*>(this)->run(x, nullptr);
}

template <class T>
Tensor<T> DeepLabV3Plus<T>::forward_train(const Tensor<T>& x, Trace& tr) {
  return run(x, &tr);
}

template <class T>
void DeepLabV3Plus<T>::backward(const Tensor<T>& dlogits, const Trace& tr) {
  Tensor<T> g = nn::pad_bottom_right(dlogits, tr.pad_h, tr.pad_w);
  g = nn::resize_bilinear_backward(g, tr.low_h, tr.low_w);
  g = classifier_.backward(g, tr.classifier, true);
  g = decoder2_.backward(g, tr.decoder2, true);
  g = decoder1_.backward(g, tr.decoder1, true);
  auto [dup, dl] = nn::split_channels(g, tr.aspp_c);
  const Tensor<T> dlow = low_project_.backward(dl, tr.low_project, true);
  const Tensor<T> da = nn::resize_bilinear_backward(dup, tr.feat_h, tr.feat_w);
  const Tensor<T> dcat = aspp_project_.backward(da, tr.aspp_project, true);
  std::vector<int> sizes(aspp_atrous_.size() + 2, tr.aspp_c);
  auto dparts = nn::split_channels(dcat, sizes);
  Tensor<T> df = aspp_1x1_.backward(dparts[0], tr.aspp_1x1, true);
  for (std::size_t i = 0; i < aspp_atrous_.size(); ++i)
    nn::add_inplace(df, aspp_atrous_[i].backward(dparts[i + 1], tr.aspp_atrous[i], true));
  Tensor<T> dp = nn::relu_backward(nn::broadcast_spatial_backward(dparts.back()), tr.pool_act);
  dp = aspp_pool_conv_.backward(dp, tr.pool_conv, true);
  nn::add_inplace(df, nn::global_avg_pool_backward(dp, tr.feat_h, tr.feat_w));

  for (int k = static_cast<int>(blocks_.size()) - 1; k >= 0; --k) {
    if (k == low_index_) nn::add_inplace(df, dlow);
    df = blocks_[k].backward(df, tr.blocks[k]);
  }
  stem_.backward(df, tr.stem, false);
}

template <class T>
void DeepLabV3Plus<T>::collect(std::vector<Param<T>*>& out) {
  stem_.collect(out);
  for (auto& b : blocks_) b.collect(out);
  aspp_1x1_.collect(out);
  for (auto& u : aspp_atrous_) u.collect(out);
  aspp_pool_conv_.collect(out);
  aspp_project_.collect(out);
  low_project_.collect(out);
  decoder1_.collect(out);
  decoder2_.collect(out);
  classifier_.collect(out);
}

template <class T>
void DeepLabV3Plus<T>::collect_buffers(std::vector<Buffer<T>>& out) {
  stem_.collect_buffers(out);
  for (auto& b : blocks_) b.collect_buffers(out);
  aspp_1x1_.collect_buffers(out);
  for (auto& u : aspp_atrous_) u.collect_buffers(out);
  aspp_project_.collect_buffers(out);
  low_project_.collect_buffers(out);
  decoder1_.collect_buffers(out);
  decoder2_.collect_buffers(out);
}

template <class T>
std::vector<Param<T>*> DeepLabV3Plus<T>::params() {
  std::vector<Param<T>*> out;
  collect(out);
  return out;
}

template <class T>
std::vector<Buffer<T>> DeepLabV3Plus<T>::buffers() {
  std::vector<Buffer<T>> out;
  collect_buffers(out);
  return out;
}

template <class T>
template <class F>
void DeepLabV3Plus<T>::for_each_bn(F&& f) {
  f(stem_.bn);
  for (auto& b : blocks_) {
    if (b.has_expand) f(b.expand.bn);
    f(b.depthwise.bn);
    f(b.project.bn);
  }
  f(aspp_1x1_.bn);
  for (auto& u : aspp_atrous_) f(u.bn);
  f(aspp_project_.bn);
  f(low_project_.bn);
  f(decoder1_.bn);
  f(decoder2_.bn);
}

template <class T>
void DeepLabV3Plus<T>::set_bn_momentum(double momentum) {
  for_each_bn([&](nn::BatchNorm2d<T>& bn) { bn.set_momentum(momentum); });
}

template <class T>
void DeepLabV3Plus<T>::reset_bn_statistics() {
  for_each_bn([](nn::BatchNorm2d<T>& bn) { bn.reset_running_stats(); });
}

#define SNOWLENS_INSTANTIATE(T)                         \
  template struct ConvUnit<T, nn::Conv2d<T>>;           \
  template struct ConvUnit<T, nn::DepthwiseConv2d<T>>;  \
  template struct InvertedResidual<T>;                  \
  template class DeepLabV3Plus<T>;

SNOWLENS_INSTANTIATE(float)
SNOWLENS_INSTANTIATE(double)

#undef SNOWLENS_INSTANTIATE

}  // namespace snowlens::segmenter
