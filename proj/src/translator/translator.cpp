#include "snowlens/translator/translator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "snowlens/core/seed.hpp"
#include "snowlens/ingest/geometry.hpp"
#include "snowlens/io/image_io.hpp"
#include "snowlens/nn/image_tensor.hpp"
#include "snowlens/nn/optim.hpp"

namespace snowlens::translator {

namespace {

Tensor<float> stack(const std::vector<Tensor<float>>& items, const std::vector<std::size_t>& idx) {
  const auto& first = items[idx[0]];
  Tensor<float> out(static_cast<int>(idx.size()), first.c, first.h, first.w);
  auto it = out.data.begin();
  for (auto i : idx) it = std::copy(items[i].data.begin(), items[i].data.end(), it);
  return out;
}

nlohmann::json history_json(const std::vector<EpochRecord>& h) {
  auto arr = nlohmann::json::array();
  for (const auto& r : h)
    arr.push_back({{"epoch", r.epoch},
                   {"steps", r.steps},
                   {"d_real", r.mean.d_real},
                   {"d_fake", r.mean.d_fake},
                   {"d_total", r.mean.d_total},
                   {"g_gan", r.mean.g_gan},
                   {"g_l1", r.mean.g_l1},
                   {"g_total", r.mean.g_total}});
  return arr;
}

std::vector<EpochRecord> history_from_json(const nlohmann::json& arr) {
  std::vector<EpochRecord> out;
  for (const auto& j : arr) {
    EpochRecord r;
    r.epoch = j.at("epoch").get<int>();
    r.steps = j.at("steps").get<std::int64_t>();
    r.mean.d_real = j.at("d_real").get<double>();
    r.mean.d_fake = j.at("d_fake").get<double>();
    r.mean.d_total = j.at("d_total").get<double>();
    r.mean.g_gan = j.at("g_gan").get<double>();
    r.mean.g_l1 = j.at("g_l1").get<double>();
    r.mean.g_total = j.at("g_total").get<double>();
    out.push_back(r);
  }
  return out;
}

bool finite(const GanLossTerms& t) {
  return std::isfinite(t.d_total) && std::isfinite(t.g_total);
}

struct Trainer {
  TranslatorModel<float> model;
  std::vector<nn::Param<float>*> gparams, dparams;
  nn::Adam<float> gopt, dopt;

  explicit Trainer(const TranslatorConfig& cfg) : model(cfg) {
    gparams = model.generator_params();
    dparams = model.discriminator_params();
    const nn::AdamOptions o{cfg.lr, cfg.beta1, cfg.beta2, 1e-8};
    gopt = nn::Adam<float>(gparams, o);
    dopt = nn::Adam<float>(dparams, o);
  }

  nn::TensorArchive archive() {
    nn::TensorArchive ar;
    nn::archive_params(ar, gparams);
    nn::archive_params(ar, dparams);
    nn::archive_adam(ar, "adam_G", gopt);
    nn::archive_adam(ar, "adam_D", dopt);
    return ar;
  }

  void restore(const nn::LoadedCheckpoint& ck) {
    nn::restore_params(ck.archive, gparams);
    nn::restore_params(ck.archive, dparams);
    nn::restore_adam(ck.archive, "adam_G", gopt);
    nn::restore_adam(ck.archive, "adam_D", dopt);
    gopt.set_steps(ck.manifest.optimizer_steps);
    dopt.set_steps(ck.manifest.optimizer_steps);
  }

  GanLossTerms step(const Tensor<float>& cond, const Tensor<float>& target) {
    UNetGenerator<float>::Trace gtr;
    const Tensor<float> fake = model.generator.forward_train(cond, gtr);
    nn::zero_grads(dparams);
    GanLossTerms t = discriminator_backward(model, cond, target, fake);
    dopt.step();
    nn::zero_grads(gparams);
    const GanLossTerms g = generator_backward(model, cond, target, fake, gtr);
    gopt.step();
    t.g_gan = g.g_gan;
    t.g_l1 = g.g_l1;
    t.g_total = g.g_total;
    return t;
  }
};

void accumulate(GanLossTerms& acc, const GanLossTerms& t) {
  acc.d_real += t.d_real;
  acc.d_fake += t.d_fake;
  acc.d_total += t.d_total;
  acc.g_gan += t.g_gan;
  acc.g_l1 += t.g_l1;
  acc.g_total += t.g_total;
}

GanLossTerms divide(GanLossTerms t, double n) {
  for (double* v : {&t.d_real, &t.d_fake, &t.d_total, &t.g_gan, &t.g_l1, &t.g_total}) *v /= n;
  return t;
}

}  // namespace

std::string role_tag(Role role) { return "translator-" + std::string(role_name(role)); }

std::string loss_csv(const std::vector<EpochRecord>& history) {
  std::string out = "epoch,adversarial_g,adversarial_d,l1,total_g,d_real,d_fake,steps\n";
  char buf[256];
  for (const auto& r : history) {
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%lld\n", r.epoch,
                  r.mean.g_gan, r.mean.d_total, r.mean.g_l1, r.mean.g_total, r.mean.d_real,
                  r.mean.d_fake, static_cast<long long>(r.steps));
    out += buf;
  }
  return out;
}

TrainResult train_translator(const TranslatorConfig& cfg,
                             const std::vector<ingest::PairedSample>& pairs,
                             const TrainOptions& options) {
  cfg.validate();
  if (pairs.empty()) throw ValueError("train_translator: no training pairs");

  std::vector<Tensor<float>> conds, targets;
  const ingest::Size2 size{cfg.height, cfg.width};
  for (const auto& p : pairs) {
    conds.push_back(nn::image_to_tensor(ingest::resize_for_translator(p.condition, size, cfg.depth)));
    targets.push_back(nn::image_to_tensor(ingest::resize_for_translator(p.target, size, cfg.depth)));
  }

  Trainer tr(cfg);
  TrainResult result;
  int start_epoch = 1;
  std::int64_t steps = 0;
  if (options.resume_from) {
    const auto ck = nn::load_checkpoint(*options.resume_from);
    if (ck.manifest.role_tag != role_tag(cfg.role))
      throw FormatError("cannot resume " + role_tag(cfg.role) + " from a " +
                        ck.manifest.role_tag + " checkpoint");
    tr.restore(ck);
    start_epoch = ck.manifest.epoch + 1;
    steps = ck.manifest.optimizer_steps;
    result.history = history_from_json(ck.manifest.loss_curve);
  }

  const bool files = !options.out_dir.empty();
  std::filesystem::path last_good;
  auto write_checkpoint = [&](const std::filesystem::path& path, int epoch) {
    nn::CheckpointManifest m;
    m.role_tag = role_tag(cfg.role);
    m.config = cfg.to_json();
    m.epoch = epoch;
    m.optimizer_steps = steps;
    m.loss_curve = history_json(result.history);
    m.seed = cfg.seed;
    nn::save_checkpoint(path, tr.archive(), m);
    last_good = nn::checkpoint_stem(path);
  };

  auto trail_path = [&](int epoch) {
    char name[32];
    std::snprintf(name, sizeof(name), "epoch_%04d", epoch);
    return options.out_dir / "checkpoints" / name;
  };
  if (files && !options.resume_from) write_checkpoint(trail_path(0), 0);

  const std::size_t n = pairs.size();
  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
  const bool by_iterations = cfg.max_iterations > 0;
  int epoch = start_epoch;
  int last_epoch = start_epoch - 1;
  for (;; ++epoch) {
    if (by_iterations ? steps >= cfg.max_iterations : epoch > cfg.epochs) break;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), rng);

    GanLossTerms acc;
    int count = 0;
    for (std::size_t s = 0; s < n; s += batch) {
      if (by_iterations && steps >= cfg.max_iterations) break;
      std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(s),
                                   order.begin() + static_cast<std::ptrdiff_t>(std::min(n, s + batch)));
      const GanLossTerms t = tr.step(stack(conds, idx), stack(targets, idx));
      ++steps;
      if (!finite(t))
        throw TrainingDivergedError("translator training diverged at epoch " +
                                        std::to_string(epoch) + ", step " + std::to_string(steps),
                                    last_good);
      accumulate(acc, t);
      ++count;
    }
    if (count == 0) break;
    EpochRecord rec{epoch, steps, divide(acc, count)};
    result.history.push_back(rec);
    last_epoch = epoch;
    if (options.on_epoch) options.on_epoch(rec);
    if (files && epoch % cfg.checkpoint_every == 0) write_checkpoint(trail_path(epoch), epoch);
  }

  if (files) {
    io::write_text(options.out_dir / "loss.csv", loss_csv(result.history));
    const auto final_path = options.out_dir / ("translator_" + std::string(role_name(cfg.role)));
    write_checkpoint(final_path, last_epoch);
    result.final_checkpoint = nn::checkpoint_stem(final_path);
  }
  result.steps = steps;
  result.model = std::move(tr.model);
  return result;
}

void save_translator(const std::filesystem::path& path, const TranslatorModel<float>& model,
                     nn::CheckpointManifest manifest) {
  auto& m = const_cast<TranslatorModel<float>&>(model);
  nn::TensorArchive ar;
  nn::archive_params(ar, m.generator_params());
  nn::archive_params(ar, m.discriminator_params());
  manifest.role_tag = role_tag(model.config.role);
  manifest.config = model.config.to_json();
  manifest.seed = model.config.seed;
  nn::save_checkpoint(path, ar, manifest);
}

LoadedTranslator load_translator(const std::filesystem::path& path, std::optional<Role> expected) {
  auto ck = nn::load_checkpoint(path);
  if (!ck.manifest.role_tag.starts_with("translator-"))
    throw FormatError(path.string() + " is a " + ck.manifest.role_tag + " checkpoint, not a translator");
  const auto cfg = TranslatorConfig::from_json(ck.manifest.config);
  if (role_tag(cfg.role) != ck.manifest.role_tag)
    throw FormatError("checkpoint role tag disagrees with its config");
  if (expected && *expected != cfg.role)
    throw FormatError("expected a " + role_tag(*expected) + " checkpoint, got " +
                      ck.manifest.role_tag);
  LoadedTranslator out{TranslatorModel<float>(cfg), std::move(ck.manifest)};
  nn::restore_params(ck.archive, out.model.generator_params());
  nn::restore_params(ck.archive, out.model.discriminator_params());
  return out;
}

RgbImage generator_forward(const TranslatorModel<float>& model, const RgbImage& x) {
  const auto& cfg = model.config;
  if (x.height() != cfg.height || x.width() != cfg.width)
    throw DimensionError("generator input " + std::to_string(x.height()) + "x" +
                         std::to_string(x.width()) + " differs from configured " +
                         std::to_string(cfg.height) + "x" + std::to_string(cfg.width));
  return nn::tensor_to_image(model.generator.forward(nn::image_to_tensor(x)));
}

Translation translate(const TranslatorModel<float>& model, const RgbImage& input,
                      const TranslateOptions& options) {
  if (input.empty()) throw DimensionError("translate: empty input");
  const auto& cfg = model.config;
  Translation t;
  t.resized = input.height() != cfg.height || input.width() != cfg.width;
  const RgbImage x = ingest::resize_for_translator(input, {cfg.height, cfg.width}, cfg.depth);
  RgbImage out = generator_forward(model, x.range() == Range::byte ? x.to_signed_unit() : x);
  for (float v : out.values())
    if (!std::isfinite(v)) throw ValueError("translate: generator produced non-finite values");
  if (options.restore_size) out = ingest::resize_bilinear(out, input.height(), input.width());
  t.image = out.to_byte();
  return t;
}

}  // namespace snowlens::translator
