#include "snowlens/nn/layers.hpp"

#include <cmath>

#include "snowlens/simd/kernels.hpp"

namespace snowlens::nn {

using simd::Trans;

namespace {

// col[(c*k + ki)*k + kj][oy*wo + ox] = x[c][oy*s - p + ki*d][ox*s - p + kj*d]
template <class T>
void im2col(const T* x, int channels, int h, int w, const ConvGeometry& g, int ho, int wo, T* col) {
  const int k = g.kernel;
  for (int c = 0; c < channels; ++c) {
    const T* plane = x + static_cast<std::size_t>(c) * h * w;
    for (int ki = 0; ki < k; ++ki) {
      for (int kj = 0; kj < k; ++kj) {
        T* row = col + (static_cast<std::size_t>(c * k + ki) * k + kj) * ho * wo;
        for (int oy = 0; oy < ho; ++oy) {
          const int iy = oy * g.stride - g.pad + ki * g.dilation;
          T* dst = row + static_cast<std::size_t>(oy) * wo;
          if (iy < 0 || iy >= h) {
            std::fill(dst, dst + wo, T(0));
            continue;
          }
          const T* src = plane + static_cast<std::size_t>(iy) * w;
          const int off = kj * g.dilation - g.pad;
          if (g.stride == 1) {
            for (int ox = 0; ox < wo; ++ox) {
              const int ix = ox + off;
              dst[ox] = (ix >= 0 && ix < w) ? src[ix] : T(0);
            }
          } else {
            for (int ox = 0; ox < wo; ++ox) {
              const int ix = ox * g.stride + off;
              dst[ox] = (ix >= 0 && ix < w) ? src[ix] : T(0);
            }
          }
        }
      }
    }
  }
}

// Adjoint of im2col: scatters-adds columns back into x (which must be zeroed
// by the caller when a fresh result is wanted).
template <class T>
void col2im(const T* col, int channels, int h, int w, const ConvGeometry& g, int ho, int wo, T* x) {
  const int k = g.kernel;
  for (int c = 0; c < channels; ++c) {
    T* plane = x + static_cast<std::size_t>(c) * h * w;
    for (int ki = 0; ki < k; ++ki) {
      for (int kj = 0; kj < k; ++kj) {
        const T* row = col + (static_cast<std::size_t>(c * k + ki) * k + kj) * ho * wo;
        for (int oy = 0; oy < ho; ++oy) {
          const int iy = oy * g.stride - g.pad + ki * g.dilation;
          if (iy < 0 || iy >= h) continue;
          T* dst = plane + static_cast<std::size_t>(iy) * w;
          const T* src = row + static_cast<std::size_t>(oy) * wo;
          const int off = kj * g.dilation - g.pad;
          for (int ox = 0; ox < wo; ++ox) {
            const int ix = ox * g.stride + off;
            if (ix >= 0 && ix < w) dst[ix] += src[ox];
          }
        }
      }
    }
  }
}

template <class T>
bool is_pointwise(const ConvGeometry& g) {
  return g.kernel == 1 && g.stride == 1 && g.pad == 0;
}

template <class T>
void add_bias(Tensor<T>& y, const Param<T>& bias) {
  for (int n = 0; n < y.n; ++n)
    for (int c = 0; c < y.c; ++c) {
      T* p = y.channel(n, c);
      const T b = bias.value.data[c];
      for (std::size_t i = 0; i < y.plane(); ++i) p[i] += b;
    }
}

template <class T>
void accumulate_bias_grad(const Tensor<T>& dy, Param<T>& bias) {
  for (int n = 0; n < dy.n; ++n)
    for (int c = 0; c < dy.c; ++c) {
      const T* p = dy.channel(n, c);
      T sum = 0;
      for (std::size_t i = 0; i < dy.plane(); ++i) sum += p[i];
      bias.grad.data[c] += sum;
    }
}

void check_channels(int got, int expect, const char* layer) {
  if (got != expect)
    throw DimensionError(std::string(layer) + ": expected " + std::to_string(expect) +
                         " input channels, got " + std::to_string(got));
}

}  // namespace

// ---------------------------------------------------------------- Conv2d

template <class T>
Conv2d<T>::Conv2d(const std::string& name, int cin, int cout, ConvGeometry geom, bool bias)
    : cin_(cin), cout_(cout), geom_(geom), has_bias_(bias),
      weight_(name + ".weight", cout, cin, geom.kernel, geom.kernel) {
  if (bias) bias_ = Param<T>(name + ".bias", 1, cout, 1, 1);
}

template <class T>
Tensor<T> Conv2d<T>::forward(const Tensor<T>& x) const {
  check_channels(x.c, cin_, "Conv2d");
  const int ho = geom_.out_size(x.h);
  const int wo = geom_.out_size(x.w);
  if (ho < 1 || wo < 1) throw DimensionError("Conv2d: input " + x.shape_str() + " too small");
  Tensor<T> y(x.n, cout_, ho, wo);
  const int kk = cin_ * geom_.kernel * geom_.kernel;
  const int hw = ho * wo;
  std::vector<T> col;
  if (!is_pointwise<T>(geom_)) col.resize(static_cast<std::size_t>(kk) * hw);
  for (int n = 0; n < x.n; ++n) {
    const T* src = x.sample(n);
    if (!col.empty()) {
      im2col(src, cin_, x.h, x.w, geom_, ho, wo, col.data());
      src = col.data();
    }
    simd::gemm<T>(Trans::no, Trans::no, cout_, hw, kk, T(1), weight_.value.data.data(), kk, src,
                  hw, T(0), y.sample(n), hw);
  }
  if (has_bias_) add_bias(y, bias_);
  return y;
}

template <class T>
Tensor<T> Conv2d<T>::forward_train(const Tensor<T>& x, Saved<T>& s) const {
  s.x = x;
  return forward(x);
}

template <class T>
Tensor<T> Conv2d<T>::backward(const Tensor<T>& dy, const Saved<T>& s, bool want_dx) {
  const Tensor<T>& x = s.x;
  const int ho = dy.h;
  const int wo = dy.w;
  const int kk = cin_ * geom_.kernel * geom_.kernel;
  const int hw = ho * wo;
  const bool pointwise = is_pointwise<T>(geom_);
  std::vector<T> col;
  std::vector<T> dcol;
  if (!pointwise) {
    col.resize(static_cast<std::size_t>(kk) * hw);
    if (want_dx) dcol.resize(col.size());
  }
  Tensor<T> dx;
  if (want_dx) dx = Tensor<T>(x.n, x.c, x.h, x.w);
  for (int n = 0; n < x.n; ++n) {
    const T* src = x.sample(n);
    if (!pointwise) {
      im2col(src, cin_, x.h, x.w, geom_, ho, wo, col.data());
      src = col.data();
    }
    // dW += dY * col^T
    simd::gemm<T>(Trans::no, Trans::yes, cout_, kk, hw, T(1), dy.sample(n), hw, src, hw, T(1),
                  weight_.grad.data.data(), kk);
    if (want_dx) {
      if (pointwise) {
        simd::gemm<T>(Trans::yes, Trans::no, kk, hw, cout_, T(1), weight_.value.data.data(), kk,
                      dy.sample(n), hw, T(0), dx.sample(n), hw);
      } else {
        simd::gemm<T>(Trans::yes, Trans::no, kk, hw, cout_, T(1), weight_.value.data.data(), kk,
                      dy.sample(n), hw, T(0), dcol.data(), hw);
        col2im(dcol.data(), cin_, x.h, x.w, geom_, ho, wo, dx.sample(n));
      }
    }
  }
  if (has_bias_) accumulate_bias_grad(dy, bias_);
  return dx;
}

template <class T>
void Conv2d<T>::collect(std::vector<Param<T>*>& out) {
  out.push_back(&weight_);
  if (has_bias_) out.push_back(&bias_);
}

// ------------------------------------------------------- ConvTranspose2d

template <class T>
ConvTranspose2d<T>::ConvTranspose2d(const std::string& name, int cin, int cout, ConvGeometry geom,
                                    bool bias)
    : cin_(cin), cout_(cout), geom_(geom), has_bias_(bias),
      weight_(name + ".weight", cin, cout, geom.kernel, geom.kernel) {
  if (bias) bias_ = Param<T>(name + ".bias", 1, cout, 1, 1);
}

template <class T>
Tensor<T> ConvTranspose2d<T>::forward(const Tensor<T>& x) const {
  check_channels(x.c, cin_, "ConvTranspose2d");
  const int ho = out_size(x.h);
  const int wo = out_size(x.w);
  Tensor<T> y(x.n, cout_, ho, wo);
  const int kk = cout_ * geom_.kernel * geom_.kernel;
  const int hw_in = x.h * x.w;
  std::vector<T> col(static_cast<std::size_t>(kk) * hw_in);
  for (int n = 0; n < x.n; ++n) {
    // col = W^T * X
    simd::gemm<T>(Trans::yes, Trans::no, kk, hw_in, cin_, T(1), weight_.value.data.data(), kk,
                  x.sample(n), hw_in, T(0), col.data(), hw_in);
    col2im(col.data(), cout_, ho, wo, geom_, x.h, x.w, y.sample(n));
  }
  if (has_bias_) add_bias(y, bias_);
  return y;
}

template <class T>
Tensor<T> ConvTranspose2d<T>::forward_train(const Tensor<T>& x, Saved<T>& s) const {
  s.x = x;
  return forward(x);
}

template <class T>
Tensor<T> ConvTranspose2d<T>::backward(const Tensor<T>& dy, const Saved<T>& s, bool want_dx) {
  const Tensor<T>& x = s.x;
  const int kk = cout_ * geom_.kernel * geom_.kernel;
  const int hw_in = x.h * x.w;
  std::vector<T> dcol(static_cast<std::size_t>(kk) * hw_in);
  Tensor<T> dx;
  if (want_dx) dx = Tensor<T>(x.n, x.c, x.h, x.w);
  for (int n = 0; n < x.n; ++n) {
    im2col(dy.sample(n), cout_, dy.h, dy.w, geom_, x.h, x.w, dcol.data());
    // dW += X * dcol^T
    simd::gemm<T>(Trans::no, Trans::yes, cin_, kk, hw_in, T(1), x.sample(n), hw_in, dcol.data(),
                  hw_in, T(1), weight_.grad.data.data(), kk);
    if (want_dx)
      simd::gemm<T>(Trans::no, Trans::no, cin_, hw_in, kk, T(1), weight_.value.data.data(), kk,
                    dcol.data(), hw_in, T(0), dx.sample(n), hw_in);
  }
  if (has_bias_) accumulate_bias_grad(dy, bias_);
  return dx;
}

template <class T>
void ConvTranspose2d<T>::collect(std::vector<Param<T>*>& out) {
  out.push_back(&weight_);
  if (has_bias_) out.push_back(&bias_);
}

// ------------------------------------------------------- DepthwiseConv2d

template <class T>
DepthwiseConv2d<T>::DepthwiseConv2d(const std::string& name, int channels, int kernel, int stride,
                                    int dilation)
    : channels_(channels),
      geom_{kernel, stride, dilation * (kernel - 1) / 2, dilation},
      weight_(name + ".weight", channels, 1, kernel, kernel) {}

template <class T>
Tensor<T> DepthwiseConv2d<T>::forward(const Tensor<T>& x) const {
  check_channels(x.c, channels_, "DepthwiseConv2d");
  const int ho = geom_.out_size(x.h);
  const int wo = geom_.out_size(x.w);
  const int k = geom_.kernel;
  Tensor<T> y(x.n, channels_, ho, wo);
  for (int n = 0; n < x.n; ++n) {
    for (int c = 0; c < channels_; ++c) {
      const T* in = x.channel(n, c);
      const T* wk = weight_.value.data.data() + static_cast<std::size_t>(c) * k * k;
      T* out = y.channel(n, c);
      for (int ki = 0; ki < k; ++ki) {
        for (int kj = 0; kj < k; ++kj) {
          const T wv = wk[ki * k + kj];
          for (int oy = 0; oy < ho; ++oy) {
            const int iy = oy * geom_.stride - geom_.pad + ki * geom_.dilation;
            if (iy < 0 || iy >= x.h) continue;
            const T* row = in + static_cast<std::size_t>(iy) * x.w;
            T* orow = out + static_cast<std::size_t>(oy) * wo;
            const int off = kj * geom_.dilation - geom_.pad;
            for (int ox = 0; ox < wo; ++ox) {
              const int ix = ox * geom_.stride + off;
              if (ix >= 0 && ix < x.w) orow[ox] += wv * row[ix];
            }
          }
        }
      }
    }
  }
  return y;
}

template <class T>
Tensor<T> DepthwiseConv2d<T>::forward_train(const Tensor<T>& x, Saved<T>& s) const {
  s.x = x;
  return forward(x);
}

template <class T>
Tensor<T> DepthwiseConv2d<T>::backward(const Tensor<T>& dy, const Saved<T>& s, bool want_dx) {
  const Tensor<T>& x = s.x;
  const int k = geom_.kernel;
  Tensor<T> dx;
  if (want_dx) dx = Tensor<T>(x.n, x.c, x.h, x.w);
  for (int n = 0; n < x.n; ++n) {
    for (int c = 0; c < channels_; ++c) {
      const T* in = x.channel(n, c);
      const T* g = dy.channel(n, c);
      const T* wk = weight_.value.data.data() + static_cast<std::size_t>(c) * k * k;
      T* gw = weight_.grad.data.data() + static_cast<std::size_t>(c) * k * k;
      T* gin = want_dx ? dx.channel(n, c) : nullptr;
      for (int ki = 0; ki < k; ++ki) {
        for (int kj = 0; kj < k; ++kj) {
          const T wv = wk[ki * k + kj];
          T acc = 0;
          for (int oy = 0; oy < dy.h; ++oy) {
            const int iy = oy * geom_.stride - geom_.pad + ki * geom_.dilation;
            if (iy < 0 || iy >= x.h) continue;
            const T* row = in + static_cast<std::size_t>(iy) * x.w;
            const T* grow = g + static_cast<std::size_t>(oy) * dy.w;
            T* girow = gin ? gin + static_cast<std::size_t>(iy) * x.w : nullptr;
            const int off = kj * geom_.dilation - geom_.pad;
            for (int ox = 0; ox < dy.w; ++ox) {
              const int ix = ox * geom_.stride + off;
              if (ix < 0 || ix >= x.w) continue;
              acc += grow[ox] * row[ix];
              if (girow) girow[ix] += wv * grow[ox];
            }
          }
          gw[ki * k + kj] += acc;
        }
      }
    }
  }
  return dx;
}

template <class T>
void DepthwiseConv2d<T>::collect(std::vector<Param<T>*>& out) {
  out.push_back(&weight_);
}

// ----------------------------------------------------------- BatchNorm2d

template <class T>
BatchNorm2d<T>::BatchNorm2d(const std::string& name, int channels, double momentum, double eps)
    : channels_(channels), momentum_(momentum), eps_(eps),
      gamma_(name + ".gamma", 1, channels, 1, 1), beta_(name + ".beta", 1, channels, 1, 1),
      running_mean_(1, channels, 1, 1, T(0)), running_var_(1, channels, 1, 1, T(1)) {
  std::fill(gamma_.value.data.begin(), gamma_.value.data.end(), T(1));
}

template <class T>
Tensor<T> BatchNorm2d<T>::forward(const Tensor<T>& x) const {
  check_channels(x.c, channels_, "BatchNorm2d");
  Tensor<T> y(x.n, x.c, x.h, x.w);
  for (int c = 0; c < x.c; ++c) {
    const T inv = T(1) / std::sqrt(running_var_.data[c] + T(eps_));
    const T scale = gamma_.value.data[c] * inv;
    const T shift = beta_.value.data[c] - running_mean_.data[c] * scale;
    for (int n = 0; n < x.n; ++n) {
      const T* in = x.channel(n, c);
      T* out = y.channel(n, c);
      for (std::size_t i = 0; i < x.plane(); ++i) out[i] = in[i] * scale + shift;
    }
  }
  return y;
}

template <class T>
Tensor<T> BatchNorm2d<T>::forward_train(const Tensor<T>& x, Saved<T>& s) {
  check_channels(x.c, channels_, "BatchNorm2d");
  const std::size_t count = static_cast<std::size_t>(x.n) * x.plane();
  Tensor<T> y(x.n, x.c, x.h, x.w);
  s.y = Tensor<T>(x.n, x.c, x.h, x.w);  // normalized activations
  s.aux.assign(static_cast<std::size_t>(x.c), T(0));
  ++batches_seen_;
  for (int c = 0; c < x.c; ++c) {
    double sum = 0;
    for (int n = 0; n < x.n; ++n) {
      const T* in = x.channel(n, c);
      for (std::size_t i = 0; i < x.plane(); ++i) sum += in[i];
    }
    const double mean = sum / double(count);
    double sq = 0;
    for (int n = 0; n < x.n; ++n) {
      const T* in = x.channel(n, c);
      for (std::size_t i = 0; i < x.plane(); ++i) {
        const double d = in[i] - mean;
        sq += d * d;
      }
    }
    const double var = sq / double(count);
    const T inv = T(1.0 / std::sqrt(var + eps_));
    s.aux[c] = inv;
    const T g = gamma_.value.data[c];
    const T b = beta_.value.data[c];
    for (int n = 0; n < x.n; ++n) {
      const T* in = x.channel(n, c);
      T* xh = s.y.channel(n, c);
      T* out = y.channel(n, c);
      for (std::size_t i = 0; i < x.plane(); ++i) {
        xh[i] = (in[i] - T(mean)) * inv;
        out[i] = g * xh[i] + b;
      }
    }
    const double unbiased = count > 1 ? var * double(count) / double(count - 1) : var;
    const double m = momentum_ < 0 ? 1.0 / double(batches_seen_) : momentum_;
    running_mean_.data[c] = T((1 - m) * running_mean_.data[c] + m * mean);
    running_var_.data[c] = T((1 - m) * running_var_.data[c] + m * unbiased);
  }
  return y;
}

template <class T>
Tensor<T> BatchNorm2d<T>::backward(const Tensor<T>& dy, const Saved<T>& s, bool want_dx) {
  const Tensor<T>& xhat = s.y;
  const double count = double(dy.n) * double(dy.plane());
  Tensor<T> dx;
  if (want_dx) dx = Tensor<T>(dy.n, dy.c, dy.h, dy.w);
  for (int c = 0; c < dy.c; ++c) {
    double sum_dy = 0;
    double sum_dy_xhat = 0;
    for (int n = 0; n < dy.n; ++n) {
      const T* g = dy.channel(n, c);
      const T* xh = xhat.channel(n, c);
      for (std::size_t i = 0; i < dy.plane(); ++i) {
        sum_dy += g[i];
        sum_dy_xhat += double(g[i]) * xh[i];
      }
    }
    gamma_.grad.data[c] += T(sum_dy_xhat);
    beta_.grad.data[c] += T(sum_dy);
    if (!want_dx) continue;
    const T scale = gamma_.value.data[c] * s.aux[c];
    const T mean_dy = T(sum_dy / count);
    const T mean_dy_xhat = T(sum_dy_xhat / count);
    for (int n = 0; n < dy.n; ++n) {
      const T* g = dy.channel(n, c);
      const T* xh = xhat.channel(n, c);
      T* out = dx.channel(n, c);
      for (std::size_t i = 0; i < dy.plane(); ++i)
        out[i] = scale * (g[i] - mean_dy - xh[i] * mean_dy_xhat);
    }
  }
  return dx;
}

template <class T>
void BatchNorm2d<T>::collect(std::vector<Param<T>*>& out) {
  out.push_back(&gamma_);
  out.push_back(&beta_);
}

template <class T>
void BatchNorm2d<T>::collect_buffers(std::vector<Buffer<T>>& out) {
  const std::string base = gamma_.name.substr(0, gamma_.name.size() - 6);
  out.push_back({base + ".running_mean", &running_mean_});
  out.push_back({base + ".running_var", &running_var_});
}

template <class T>
void BatchNorm2d<T>::reset_running_stats() {
  running_mean_.zero();
  std::fill(running_var_.data.begin(), running_var_.data.end(), T(1));
  batches_seen_ = 0;
}

// -------------------------------------------------------- InstanceNorm2d

template <class T>
InstanceNorm2d<T>::InstanceNorm2d(const std::string& name, int channels, double eps)
    : channels_(channels), eps_(eps), gamma_(name + ".gamma", 1, channels, 1, 1),
      beta_(name + ".beta", 1, channels, 1, 1) {
  std::fill(gamma_.value.data.begin(), gamma_.value.data.end(), T(1));
}

template <class T>
Tensor<T> InstanceNorm2d<T>::normalize(const Tensor<T>& x, Tensor<T>* xhat,
                                       std::vector<T>* invstd) const {
  check_channels(x.c, channels_, "InstanceNorm2d");
  Tensor<T> y(x.n, x.c, x.h, x.w);
  const double count = double(x.plane());
  for (int n = 0; n < x.n; ++n) {
    for (int c = 0; c < x.c; ++c) {
      const T* in = x.channel(n, c);
      double sum = 0;
      for (std::size_t i = 0; i < x.plane(); ++i) sum += in[i];
      const double mean = sum / count;
      double sq = 0;
      for (std::size_t i = 0; i < x.plane(); ++i) {
        const double d = in[i] - mean;
        sq += d * d;
      }
      const T inv = T(1.0 / std::sqrt(sq / count + eps_));
      if (invstd) (*invstd)[static_cast<std::size_t>(n) * x.c + c] = inv;
      const T g = gamma_.value.data[c];
      const T b = beta_.value.data[c];
      T* out = y.channel(n, c);
      T* xh = xhat ? xhat->channel(n, c) : nullptr;
      for (std::size_t i = 0; i < x.plane(); ++i) {
        const T v = (in[i] - T(mean)) * inv;
        if (xh) xh[i] = v;
        out[i] = g * v + b;
      }
    }
  }
  return y;
}

template <class T>
Tensor<T> InstanceNorm2d<T>::forward(const Tensor<T>& x) const {
  return normalize(x, nullptr, nullptr);
}

template <class T>
Tensor<T> InstanceNorm2d<T>::forward_train(const Tensor<T>& x, Saved<T>& s) const {
  s.y = Tensor<T>(x.n, x.c, x.h, x.w);
  s.aux.assign(static_cast<std::size_t>(x.n) * x.c, T(0));
  return normalize(x, &s.y, &s.aux);
}

template <class T>
Tensor<T> InstanceNorm2d<T>::backward(const Tensor<T>& dy, const Saved<T>& s, bool want_dx) {
  const Tensor<T>& xhat = s.y;
  const double count = double(dy.plane());
  Tensor<T> dx;
  if (want_dx) dx = Tensor<T>(dy.n, dy.c, dy.h, dy.w);
  for (int n = 0; n < dy.n; ++n) {
    for (int c = 0; c < dy.c; ++c) {
      const T* g = dy.channel(n, c);
      const T* xh = xhat.channel(n, c);
      double sum_dy = 0;
      double sum_dy_xhat = 0;
      for (std::size_t i = 0; i < dy.plane(); ++i) {
        sum_dy += g[i];
        sum_dy_xhat += double(g[i]) * xh[i];
      }
      gamma_.grad.data[c] += T(sum_dy_xhat);
      beta_.grad.data[c] += T(sum_dy);
      if (!want_dx) continue;
      const T scale = gamma_.value.data[c] * s.aux[static_cast<std::size_t>(n) * dy.c + c];
      const T mean_dy = T(sum_dy / count);
      const T mean_dy_xhat = T(sum_dy_xhat / count);
      T* out = dx.channel(n, c);
      for (std::size_t i = 0; i < dy.plane(); ++i)
        out[i] = scale * (g[i] - mean_dy - xh[i] * mean_dy_xhat);
    }
  }
  return dx;
}

template <class T>
void InstanceNorm2d<T>::collect(std::vector<Param<T>*>& out) {
  out.push_back(&gamma_);
  out.push_back(&beta_);
}

// ---------------------------------------------------------- initializers

template <class T>
void init_normal(Param<T>& p, std::mt19937_64& rng, double mean, double stddev) {
  std::normal_distribution<double> dist(mean, stddev);
  for (auto& v : p.value.data) v = T(dist(rng));
}

template <class T>
void init_constant(Param<T>& p, T value) {
  std::fill(p.value.data.begin(), p.value.data.end(), value);
}

template <class T>
void init_kaiming(Param<T>& p, std::mt19937_64& rng) {
  const double fan_in = double(p.value.c) * p.value.h * p.value.w;
  init_normal(p, rng, 0.0, std::sqrt(2.0 / std::max(1.0, fan_in)));
}

#define SNOWLENS_INSTANTIATE(T)                                              \
  template class Conv2d<T>;                                                  \
  template class ConvTranspose2d<T>;                                         \
  template class DepthwiseConv2d<T>;                                         \
  template class BatchNorm2d<T>;                                             \
  template class InstanceNorm2d<T>;                                          \
  template void init_normal<T>(Param<T>&, std::mt19937_64&, double, double); \
  template void init_constant<T>(Param<T>&, T);                              \
  template void init_kaiming<T>(Param<T>&, std::mt19937_64&);

SNOWLENS_INSTANTIATE(float)
SNOWLENS_INSTANTIATE(double)

#undef SNOWLENS_INSTANTIATE

}  // namespace snowlens::nn
