#pragma once

#include <random>
#include <utility>
#include <vector>

#include "snowlens/nn/layers.hpp"
#include "snowlens/nn/loss.hpp"
#include "snowlens/translator/config.hpp"

namespace snowlens::translator {

using nn::Param;
using nn::Saved;
using nn::Tensor;

// Skip-connected encoder/decoder. Level i has base * min(2^i, 8) channels;
// encoder levels are LeakyReLU(0.2) -> Conv4s2 -> InstanceNorm (no activation
// on the first level, no norm on the first and innermost), decoder levels are
// ReLU -> ConvT4s2 -> InstanceNorm, and the outermost decoder ends in tanh.
template <class T>
class UNetGenerator {
 public:
  struct Trace {
    std::vector<Saved<T>> down_conv, down_norm, up_conv, up_norm;
    std::vector<Tensor<T>> down_act, up_act;
    Tensor<T> out;
  };

  UNetGenerator() = default;
  UNetGenerator(const TranslatorConfig& cfg, std::mt19937_64& rng);

  Tensor<T> forward(const Tensor<T>& x) const;
  Tensor<T> forward_train(const Tensor<T>& x, Trace& tr) const;
  Tensor<T> backward(const Tensor<T>& dy, const Trace& tr, bool want_dx = false);

  void collect(std::vector<Param<T>*>& out);
  int depth() const { return depth_; }

 private:
  Tensor<T> run(const Tensor<T>& x, Trace* tr) const;
  bool has_down_norm(int i) const { return i > 0 && i < depth_ - 1; }

  int depth_ = 0;
  std::vector<int> channels_;
  std::vector<nn::Conv2d<T>> down_;
  std::vector<nn::InstanceNorm2d<T>> down_norm_;
  std::vector<nn::ConvTranspose2d<T>> up_;
  std::vector<nn::InstanceNorm2d<T>> up_norm_;
};

// Patch discriminator on the channel concatenation (condition, image).
// k4 p1 convolutions: disc_layers stride-2 layers, one stride-1 layer and a
// stride-1 single-channel logit layer. 128x192 input gives a 14x22 grid.
template <class T>
class PatchDiscriminator {
 public:
  struct Trace {
    std::vector<Saved<T>> conv, norm;
    std::vector<Tensor<T>> act;
  };

  PatchDiscriminator() = default;
  PatchDiscriminator(const TranslatorConfig& cfg, std::mt19937_64& rng);

  Tensor<T> forward(const Tensor<T>& pair) const;
  Tensor<T> forward_train(const Tensor<T>& pair, Trace& tr) const;
  Tensor<T> backward(const Tensor<T>& dy, const Trace& tr, bool want_dx);

  void collect(std::vector<Param<T>*>& out);

 private:
  Tensor<T> run(const Tensor<T>& x, Trace* tr) const;
  bool has_norm(int j) const { return j > 0 && j < static_cast<int>(conv_.size()) - 1; }

  std::vector<nn::Conv2d<T>> conv_;
  std::vector<nn::InstanceNorm2d<T>> norm_;
};

// Logit grid (height, width) of the discriminator for the configured size.
std::pair<int, int> patch_grid(const TranslatorConfig& cfg);

template <class T>
struct TranslatorModel {
  TranslatorConfig config;
  UNetGenerator<T> generator;
  PatchDiscriminator<T> discriminator;

  TranslatorModel() = default;
  // Seeded construction: identical config and seed give identical weights.
  explicit TranslatorModel(const TranslatorConfig& cfg);

  std::vector<Param<T>*> generator_params();
  std::vector<Param<T>*> discriminator_params();
};

struct GanLossTerms {
  double d_real = 0;   // criterion on D(condition, real)
  double d_fake = 0;   // criterion on D(condition, fake)
  double d_total = 0;  // 0.5 * (d_real + d_fake)
  double g_gan = 0;    // criterion on D(condition, fake) against the real label
  double g_l1 = 0;     // mean |fake - real|
  double g_total = 0;  // g_gan + lambda * g_l1
};

// Adversarial criterion for a logit grid against the real (1) or fake (0) label.
template <class T>
nn::LossResult<T> gan_criterion(const Tensor<T>& logits, bool real, GanMode mode);

// All loss terms from inference passes only (no gradients).
template <class T>
GanLossTerms translator_loss(const TranslatorModel<T>& m, const Tensor<T>& condition,
                             const Tensor<T>& target);

// Discriminator objective on a detached fake. Real and fake pairs share one
// batched pass. Accumulates discriminator gradients.
template <class T>
GanLossTerms discriminator_backward(TranslatorModel<T>& m, const Tensor<T>& condition,
                                    const Tensor<T>& target, const Tensor<T>& fake);

// Generator objective for a fake produced by generator.forward_train(tr).
// Accumulates generator gradients; discriminator gradients are also
// touched and must be cleared by the caller before the next D update.
template <class T>
GanLossTerms generator_backward(TranslatorModel<T>& m, const Tensor<T>& condition,
                                const Tensor<T>& target, const Tensor<T>& fake,
                                const typename UNetGenerator<T>::Trace& tr);

}  // namespace snowlens::translator
