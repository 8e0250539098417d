#include "snowlens/nn/functional.hpp"

#include <algorithm>
#include <cmath>

namespace snowlens::nn {

template <class T>
Tensor<T> relu(const Tensor<T>& x) {
  Tensor<T> y = x;
  for (auto& v : y.data) v = v > T(0) ? v : T(0);
  return y;
}

template <class T>
Tensor<T> relu_backward(const Tensor<T>& dy, const Tensor<T>& y) {
  Tensor<T> dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i)
    if (!(y.data[i] > T(0))) dx.data[i] = T(0);
  return dx;
}

template <class T>
Tensor<T> relu6(const Tensor<T>& x) {
  Tensor<T> y = x;
  for (auto& v : y.data) v = std::clamp(v, T(0), T(6));
  return y;
}

template <class T>
Tensor<T> relu6_backward(const Tensor<T>& dy, const Tensor<T>& y) {
  Tensor<T> dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i)
    if (!(y.data[i] > T(0) && y.data[i] < T(6))) dx.data[i] = T(0);
  return dx;
}

template <class T>
Tensor<T> leaky_relu(const Tensor<T>& x, T slope) {
  Tensor<T> y = x;
  for (auto& v : y.data) v = v > T(0) ? v : v * slope;
  return y;
}

template <class T>
Tensor<T> leaky_relu_backward(const Tensor<T>& dy, const Tensor<T>& y, T slope) {
  Tensor<T> dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i)
    if (!(y.data[i] > T(0))) dx.data[i] *= slope;
  return dx;
}

template <class T>
Tensor<T> tanh(const Tensor<T>& x) {
  Tensor<T> y = x;
  for (auto& v : y.data) v = std::tanh(v);
  return y;
}

template <class T>
Tensor<T> tanh_backward(const Tensor<T>& dy, const Tensor<T>& y) {
  Tensor<T> dx = dy;
  for (std::size_t i = 0; i < dx.size(); ++i) dx.data[i] *= T(1) - y.data[i] * y.data[i];
  return dx;
}

template <class T>
Tensor<T> concat_channels(const std::vector<Tensor<T>>& parts) {
  if (parts.empty()) throw DimensionError("concat of nothing");
  int channels = 0;
  for (const auto& p : parts) {
    if (p.n != parts[0].n || p.h != parts[0].h || p.w != parts[0].w)
      throw DimensionError("concat_channels: " + p.shape_str() + " vs " + parts[0].shape_str());
    channels += p.c;
  }
  Tensor<T> out(parts[0].n, channels, parts[0].h, parts[0].w);
  for (int n = 0; n < out.n; ++n) {
    T* dst = out.sample(n);
    for (const auto& p : parts) {
      std::copy(p.sample(n), p.sample(n) + p.sample_size(), dst);
      dst += p.sample_size();
    }
  }
  return out;
}

template <class T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
  return concat_channels<T>(std::vector<Tensor<T>>{a, b});
}

template <class T>
std::vector<Tensor<T>> split_channels(const Tensor<T>& x, const std::vector<int>& sizes) {
  int total = 0;
  for (int s : sizes) total += s;
  if (total != x.c) throw DimensionError("split_channels: sizes do not sum to channel count");
  std::vector<Tensor<T>> out;
  for (int s : sizes) out.emplace_back(x.n, s, x.h, x.w);
  for (int n = 0; n < x.n; ++n) {
    const T* src = x.sample(n);
    for (auto& p : out) {
      std::copy(src, src + p.sample_size(), p.sample(n));
      src += p.sample_size();
    }
  }
  return out;
}

template <class T>
std::pair<Tensor<T>, Tensor<T>> split_channels(const Tensor<T>& x, int first_channels) {
  auto parts = split_channels<T>(x, std::vector<int>{first_channels, x.c - first_channels});
  return {std::move(parts[0]), std::move(parts[1])};
}

template <class T>
void add_inplace(Tensor<T>& acc, const Tensor<T>& x) {
  if (acc.data.empty()) {
    acc = x;
    return;
  }
  require_same_shape(acc, x, "add_inplace");
  for (std::size_t i = 0; i < acc.size(); ++i) acc.data[i] += x.data[i];
}

template <class T>
void scale_inplace(Tensor<T>& x, T s) {
  for (auto& v : x.data) v *= s;
}

namespace {

struct AxisTaps {
  std::vector<int> lo;
  std::vector<int> hi;
  std::vector<double> frac;
};

AxisTaps axis_taps(int src, int dst) {
  AxisTaps t;
  t.lo.resize(dst);
  t.hi.resize(dst);
  t.frac.resize(dst);
  const double scale = double(src) / dst;
  for (int i = 0; i < dst; ++i) {
    const double s = std::clamp((i + 0.5) * scale - 0.5, 0.0, double(src - 1));
    const int lo = static_cast<int>(s);
    t.lo[i] = lo;
    t.hi[i] = std::min(lo + 1, src - 1);
    t.frac[i] = s - lo;
  }
  return t;
}

}  // namespace

template <class T>
Tensor<T> resize_bilinear(const Tensor<T>& x, int h, int w) {
  if (x.h == h && x.w == w) return x;
  const AxisTaps ty = axis_taps(x.h, h);
  const AxisTaps tx = axis_taps(x.w, w);
  Tensor<T> y(x.n, x.c, h, w);
  for (int n = 0; n < x.n; ++n)
    for (int c = 0; c < x.c; ++c) {
      const T* in = x.channel(n, c);
      T* out = y.channel(n, c);
      for (int oy = 0; oy < h; ++oy) {
        const T fy = T(ty.frac[oy]);
        const T* r0 = in + static_cast<std::size_t>(ty.lo[oy]) * x.w;
        const T* r1 = in + static_cast<std::size_t>(ty.hi[oy]) * x.w;
        for (int ox = 0; ox < w; ++ox) {
          const T fx = T(tx.frac[ox]);
          const T top = (1 - fx) * r0[tx.lo[ox]] + fx * r0[tx.hi[ox]];
          const T bot = (1 - fx) * r1[tx.lo[ox]] + fx * r1[tx.hi[ox]];
          out[static_cast<std::size_t>(oy) * w + ox] = (1 - fy) * top + fy * bot;
        }
      }
    }
  return y;
}

template <class T>
Tensor<T> resize_bilinear_backward(const Tensor<T>& dy, int in_h, int in_w) {
  if (dy.h == in_h && dy.w == in_w) return dy;
  const AxisTaps ty = axis_taps(in_h, dy.h);
  const AxisTaps tx = axis_taps(in_w, dy.w);
  Tensor<T> dx(dy.n, dy.c, in_h, in_w);
  for (int n = 0; n < dy.n; ++n)
    for (int c = 0; c < dy.c; ++c) {
      const T* g = dy.channel(n, c);
      T* out = dx.channel(n, c);
      for (int oy = 0; oy < dy.h; ++oy) {
        const T fy = T(ty.frac[oy]);
        T* r0 = out + static_cast<std::size_t>(ty.lo[oy]) * in_w;
        T* r1 = out + static_cast<std::size_t>(ty.hi[oy]) * in_w;
        for (int ox = 0; ox < dy.w; ++ox) {
          const T fx = T(tx.frac[ox]);
          const T v = g[static_cast<std::size_t>(oy) * dy.w + ox];
          r0[tx.lo[ox]] += (1 - fy) * (1 - fx) * v;
          r0[tx.hi[ox]] += (1 - fy) * fx * v;
          r1[tx.lo[ox]] += fy * (1 - fx) * v;
          r1[tx.hi[ox]] += fy * fx * v;
        }
      }
    }
  return dx;
}

template <class T>
Tensor<T> global_avg_pool(const Tensor<T>& x) {
  Tensor<T> y(x.n, x.c, 1, 1);
  for (int n = 0; n < x.n; ++n)
    for (int c = 0; c < x.c; ++c) {
      const T* p = x.channel(n, c);
      double sum = 0;
      for (std::size_t i = 0; i < x.plane(); ++i) sum += p[i];
      y.at(n, c, 0, 0) = T(sum / double(x.plane()));
    }
  return y;
}

template <class T>
Tensor<T> global_avg_pool_backward(const Tensor<T>& dy, int h, int w) {
  Tensor<T> dx(dy.n, dy.c, h, w);
  const T inv = T(1) / T(h * w);
  for (int n = 0; n < dy.n; ++n)
    for (int c = 0; c < dy.c; ++c) {
      const T v = dy.at(n, c, 0, 0) * inv;
      T* p = dx.channel(n, c);
      std::fill(p, p + dx.plane(), v);
    }
  return dx;
}

template <class T>
Tensor<T> broadcast_spatial(const Tensor<T>& x, int h, int w) {
  Tensor<T> y(x.n, x.c, h, w);
  for (int n = 0; n < x.n; ++n)
    for (int c = 0; c < x.c; ++c) {
      T* p = y.channel(n, c);
      std::fill(p, p + y.plane(), x.at(n, c, 0, 0));
    }
  return y;
}

template <class T>
Tensor<T> broadcast_spatial_backward(const Tensor<T>& dy) {
  Tensor<T> dx(dy.n, dy.c, 1, 1);
  for (int n = 0; n < dy.n; ++n)
    for (int c = 0; c < dy.c; ++c) {
      const T* p = dy.channel(n, c);
      T sum = 0;
      for (std::size_t i = 0; i < dy.plane(); ++i) sum += p[i];
      dx.at(n, c, 0, 0) = sum;
    }
  return dx;
}

template <class T>
Tensor<T> pad_bottom_right(const Tensor<T>& x, int h, int w) {
  if (h == x.h && w == x.w) return x;
  if (h < x.h || w < x.w) throw DimensionError("pad target smaller than input");
  Tensor<T> y(x.n, x.c, h, w);
  for (int n = 0; n < x.n; ++n)
    for (int c = 0; c < x.c; ++c)
      for (int yy = 0; yy < x.h; ++yy)
        std::copy(x.channel(n, c) + static_cast<std::size_t>(yy) * x.w,
                  x.channel(n, c) + static_cast<std::size_t>(yy + 1) * x.w,
                  y.channel(n, c) + static_cast<std::size_t>(yy) * w);
  return y;
}

template <class T>
Tensor<T> crop_top_left(const Tensor<T>& x, int h, int w) {
  if (h == x.h && w == x.w) return x;
  if (h > x.h || w > x.w) throw DimensionError("crop target larger than input");
  Tensor<T> y(x.n, x.c, h, w);
  for (int n = 0; n < x.n; ++n)
    for (int c = 0; c < x.c; ++c)
      for (int yy = 0; yy < h; ++yy)
        std::copy(x.channel(n, c) + static_cast<std::size_t>(yy) * x.w,
                  x.channel(n, c) + static_cast<std::size_t>(yy) * x.w + w,
                  y.channel(n, c) + static_cast<std::size_t>(yy) * w);
  return y;
}

template <class T>
Tensor<T> softmax_channels(const Tensor<T>& logits) {
  Tensor<T> p(logits.n, logits.c, logits.h, logits.w);
  const std::size_t plane = logits.plane();
  for (int n = 0; n < logits.n; ++n) {
    for (std::size_t i = 0; i < plane; ++i) {
      T mx = logits.channel(n, 0)[i];
      for (int c = 1; c < logits.c; ++c) mx = std::max(mx, logits.channel(n, c)[i]);
      double sum = 0;
      for (int c = 0; c < logits.c; ++c) {
        const double e = std::exp(double(logits.channel(n, c)[i] - mx));
        p.channel(n, c)[i] = T(e);
        sum += e;
      }
      for (int c = 0; c < logits.c; ++c) p.channel(n, c)[i] = T(p.channel(n, c)[i] / sum);
    }
  }
  return p;
}

#define SNOWLENS_INSTANTIATE(T)                                                               \
  template Tensor<T> relu<T>(const Tensor<T>&);                                               \
  template Tensor<T> relu_backward<T>(const Tensor<T>&, const Tensor<T>&);                    \
  template Tensor<T> relu6<T>(const Tensor<T>&);                                              \
  template Tensor<T> relu6_backward<T>(const Tensor<T>&, const Tensor<T>&);                   \
  template Tensor<T> leaky_relu<T>(const Tensor<T>&, T);                                      \
  template Tensor<T> leaky_relu_backward<T>(const Tensor<T>&, const Tensor<T>&, T);           \
  template Tensor<T> tanh<T>(const Tensor<T>&);                                               \
  template Tensor<T> tanh_backward<T>(const Tensor<T>&, const Tensor<T>&);                    \
  template Tensor<T> concat_channels<T>(const Tensor<T>&, const Tensor<T>&);                  \
  template Tensor<T> concat_channels<T>(const std::vector<Tensor<T>>&);                       \
  template std::pair<Tensor<T>, Tensor<T>> split_channels<T>(const Tensor<T>&, int);          \
  template std::vector<Tensor<T>> split_channels<T>(const Tensor<T>&, const std::vector<int>&); \
  template void add_inplace<T>(Tensor<T>&, const Tensor<T>&);                                 \
  template void scale_inplace<T>(Tensor<T>&, T);                                              \
  template Tensor<T> resize_bilinear<T>(const Tensor<T>&, int, int);                          \
  template Tensor<T> resize_bilinear_backward<T>(const Tensor<T>&, int, int);                 \
  template Tensor<T> global_avg_pool<T>(const Tensor<T>&);                                    \
  template Tensor<T> global_avg_pool_backward<T>(const Tensor<T>&, int, int);                 \
  template Tensor<T> broadcast_spatial<T>(const Tensor<T>&, int, int);                        \
  template Tensor<T> broadcast_spatial_backward<T>(const Tensor<T>&);                         \
  template Tensor<T> pad_bottom_right<T>(const Tensor<T>&, int, int);                         \
  template Tensor<T> crop_top_left<T>(const Tensor<T>&, int, int);                            \
  template Tensor<T> softmax_channels<T>(const Tensor<T>&);

SNOWLENS_INSTANTIATE(float)
SNOWLENS_INSTANTIATE(double)

#undef SNOWLENS_INSTANTIATE

}  // namespace snowlens::nn
