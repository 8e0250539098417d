#include "snowlens/segmenter/segmenter.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "snowlens/core/mask_ops.hpp"
#include "snowlens/core/seed.hpp"
#include "snowlens/ingest/geometry.hpp"
#include "snowlens/io/image_io.hpp"
#include "snowlens/metrics/metrics.hpp"
#include "snowlens/nn/functional.hpp"
#include "snowlens/nn/image_tensor.hpp"
#include "snowlens/nn/loss.hpp"
#include "snowlens/nn/optim.hpp"

namespace snowlens::segmenter {

namespace {

void require_input_size(const SegmenterConfig& cfg, int h, int w, const char* what) {
  if (h != cfg.input_height || w != cfg.input_width)
    throw DimensionError(std::string(what) + ": image " + std::to_string(h) + "x" +
                         std::to_string(w) + " differs from segmenter input size " +
                         std::to_string(cfg.input_height) + "x" + std::to_string(cfg.input_width));
}

ClassScores to_scores(const Tensor<float>& logits, int index) {
  const Tensor<float> p = nn::softmax_channels(logits);
  ClassScores s;
  s.height = p.h;
  s.width = p.w;
  s.probs.resize(p.plane() * kNumClasses);
  for (int c = 0; c < kNumClasses; ++c) {
    const float* src = p.channel(index, c);
    for (std::size_t i = 0; i < p.plane(); ++i) s.probs[i * kNumClasses + c] = src[i];
  }
  return s;
}

// Argmax over logits of sample n, lowest index on ties.
void argmax_into(const Tensor<float>& logits, int n, std::uint8_t* out) {
  for (std::size_t i = 0; i < logits.plane(); ++i) {
    int best = 0;
    float bv = logits.channel(n, 0)[i];
    for (int c = 1; c < logits.c; ++c) {
      const float v = logits.channel(n, c)[i];
      if (v > bv) {
        bv = v;
        best = c;
      }
    }
    out[i] = static_cast<std::uint8_t>(best);
  }
}

nlohmann::json history_json(const std::vector<SegEpochRecord>& h) {
  auto arr = nlohmann::json::array();
  for (const auto& r : h)
    arr.push_back({{"epoch", r.epoch},
                   {"loss", r.loss},
                   {"pixel_accuracy", r.pixel_accuracy},
                   {"miou", r.miou}});
  return arr;
}

std::vector<SegEpochRecord> history_from_json(const nlohmann::json& arr) {
  std::vector<SegEpochRecord> out;
  for (const auto& j : arr)
    out.push_back({j.at("epoch").get<int>(), j.at("loss").get<double>(),
                   j.at("pixel_accuracy").get<double>(), j.at("miou").get<double>()});
  return out;
}

nn::TensorArchive model_archive(SegmenterModel& m) {
  nn::TensorArchive ar;
  nn::archive_params(ar, m.params());
  nn::archive_buffers(ar, m.buffers());
  return ar;
}

}  // namespace

ClassScores segment_scores(const SegmenterModel& model, const RgbImage& image) {
  require_input_size(model.config(), image.height(), image.width(), "segment_scores");
  return to_scores(model.forward(nn::image_to_tensor(image)), 0);
}

LabelMap argmax_labels(const ClassScores& scores) {
  LabelMap out(scores.height, scores.width);
  auto labels = out.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const float* p = scores.probs.data() + i * kNumClasses;
    labels[i] = static_cast<std::uint8_t>(std::max_element(p, p + kNumClasses) - p);
  }
  return out;
}

LabelMap segment(const SegmenterModel& model, const RgbImage& image) {
  require_input_size(model.config(), image.height(), image.width(), "segment");
  const Tensor<float> logits = model.forward(nn::image_to_tensor(image));
  LabelMap out(image.height(), image.width());
  argmax_into(logits, 0, out.labels().data());
  return out;
}

LabelMap segment_frame(const SegmenterModel& model, const RgbImage& frame) {
  const auto& cfg = model.config();
  if (cfg.input_height != cfg.input_width)
    throw ValueError("segment_frame needs square segmenter crops");
  const int size = cfg.input_height;
  const RgbImage grid =
      ingest::resize_bilinear(frame, cfg.grid_rows * size, cfg.grid_cols * size);
  const auto crops = ingest::crop_grid(grid, std::nullopt, cfg.grid_rows, cfg.grid_cols, size);
  std::vector<LabelMap> tiles;
  for (const auto& c : crops) tiles.push_back(segment(model, c.image));
  const LabelMap stitched = ingest::reassemble_labels(tiles, cfg.grid_rows, cfg.grid_cols);
  return resize_nearest(stitched, frame.height(), frame.width());
}

std::vector<ingest::AnnotatedSample> prepare_crops(const std::vector<ingest::AnnotatedSample>& frames,
                                                   const SegmenterConfig& cfg) {
  if (cfg.input_height != cfg.input_width)
    throw ValueError("prepare_crops needs square segmenter crops");
  const int size = cfg.input_height;
  const int gh = cfg.grid_rows * size;
  const int gw = cfg.grid_cols * size;
  std::vector<ingest::AnnotatedSample> out;
  for (const auto& f : frames) {
    const RgbImage img = ingest::resize_bilinear(f.image, gh, gw);
    const LabelMap lab = resize_nearest(f.label, gh, gw);
    for (auto& c : ingest::crop_grid(img, lab, cfg.grid_rows, cfg.grid_cols, size)) {
      out.push_back({f.id + "_r" + std::to_string(c.row) + "c" + std::to_string(c.col),
                     std::move(c.image), std::move(*c.label)});
    }
  }
  return out;
}

std::string train_metrics_csv(const std::vector<SegEpochRecord>& history) {
  std::string out = "epoch,loss,pixel_accuracy,miou\n";
  char buf[160];
  for (const auto& r : history) {
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g\n", r.epoch, r.loss, r.pixel_accuracy, r.miou);
    out += buf;
  }
  return out;
}

SegTrainResult train_segmenter(const SegmenterConfig& cfg,
                               const std::vector<ingest::AnnotatedSample>& crops,
                               const SegTrainOptions& options) {
  cfg.validate();
  if (crops.empty()) throw ValueError("train_segmenter: no training crops");
  for (const auto& c : crops) {
    require_input_size(cfg, c.image.height(), c.image.width(), "train_segmenter");
    require_same_dims(c.image, c.label, "train_segmenter");
  }

  SegTrainResult result;
  result.model = SegmenterModel(cfg);
  SegmenterModel& model = result.model;
  auto params = model.params();
  nn::Adam<float> opt(params, {cfg.lr, cfg.beta1, cfg.beta2, 1e-8});

  if (options.backbone_init) {
    const auto ck = nn::load_checkpoint(*options.backbone_init);
    for (auto* p : params)
      if ((p->name.starts_with("S.backbone.") || p->name.starts_with("S.stem.")) &&
          ck.archive.has(p->name))
        ck.archive.restore(p->name, p->value);
    for (const auto& b : model.buffers())
      if ((b.name.starts_with("S.backbone.") || b.name.starts_with("S.stem.")) &&
          ck.archive.has(b.name))
        ck.archive.restore(b.name, *b.tensor);
  }

  int start_epoch = 1;
  if (options.resume_from) {
    const auto ck = nn::load_checkpoint(*options.resume_from);
    if (ck.manifest.role_tag != kSegmenterRoleTag)
      throw FormatError("cannot resume a segmenter from a " + ck.manifest.role_tag + " checkpoint");
    nn::restore_params(ck.archive, params);
    nn::restore_buffers(ck.archive, model.buffers());
    nn::restore_adam(ck.archive, "adam_S", opt);
    opt.set_steps(ck.manifest.optimizer_steps);
    start_epoch = ck.manifest.epoch + 1;
    result.history = history_from_json(ck.manifest.loss_curve);
  }

  std::vector<double> weights;
  if (cfg.class_weighting) {
    std::array<double, kNumClasses> counts{};
    double total = 0;
    for (const auto& c : crops)
      for (auto v : c.label.labels()) {
        counts[v] += 1;
        total += 1;
      }
    for (double n : counts) weights.push_back(n > 0 ? total / (kNumClasses * n) : 0.0);
  }

  const bool files = !options.out_dir.empty();
  std::filesystem::path last_good;
  auto write_checkpoint = [&](const std::filesystem::path& path, int epoch) {
    nn::TensorArchive ar = model_archive(model);
    nn::archive_adam(ar, "adam_S", opt);
    nn::CheckpointManifest m;
    m.role_tag = kSegmenterRoleTag;
    m.config = cfg.to_json();
    m.epoch = epoch;
    m.optimizer_steps = opt.steps();
    m.loss_curve = history_json(result.history);
    m.seed = cfg.seed;
    nn::save_checkpoint(path, ar, m);
    last_good = nn::checkpoint_stem(path);
  };
  auto trail_path = [&](int epoch) {
    char name[32];
    std::snprintf(name, sizeof(name), "epoch_%04d", epoch);
    return options.out_dir / "checkpoints" / name;
  };
  if (files && !options.resume_from) write_checkpoint(trail_path(0), 0);

  const std::size_t n = crops.size();
  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
  auto make_batch = [&](const std::vector<std::size_t>& idx, std::vector<std::uint8_t>& labels) {
    std::vector<const RgbImage*> imgs;
    labels.clear();
    for (auto i : idx) {
      imgs.push_back(&crops[i].image);
      labels.insert(labels.end(), crops[i].label.labels().begin(), crops[i].label.labels().end());
    }
    return nn::images_to_tensor(imgs);
  };

  for (int epoch = start_epoch; epoch <= cfg.epochs; ++epoch) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), rng);

    metrics::ConfusionMatrix cm;
    double loss_sum = 0;
    int batches = 0;
    std::vector<std::uint8_t> labels, pred;
    for (std::size_t s = 0; s < n; s += batch) {
      std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(s),
                                   order.begin() + static_cast<std::ptrdiff_t>(std::min(n, s + batch)));
      const Tensor<float> x = make_batch(idx, labels);
      typename SegmenterModel::Trace tr;
      const Tensor<float> logits = model.forward_train(x, tr);
      auto loss = nn::softmax_cross_entropy(logits, labels, weights);
      if (!std::isfinite(loss.value))
        throw SegmenterDivergedError("segmenter training diverged at epoch " + std::to_string(epoch),
                                     last_good);
      nn::zero_grads(params);
      model.backward(loss.grad, tr);
      opt.step();
      pred.resize(labels.size());
      for (int b = 0; b < logits.n; ++b) argmax_into(logits, b, pred.data() + b * logits.plane());
      cm.accumulate(pred, labels);
      loss_sum += loss.value;
      ++batches;
    }
    const auto rep = metrics::summarize(cm);
    SegEpochRecord rec{epoch, loss_sum / batches, rep.pixel_accuracy, rep.mean_iou};
    result.history.push_back(rec);
    if (options.on_epoch) options.on_epoch(rec);
    if (files && epoch % cfg.checkpoint_every == 0) write_checkpoint(trail_path(epoch), epoch);
  }

  if (options.recalibrate_bn && cfg.epochs >= start_epoch) {
    model.reset_bn_statistics();
    model.set_bn_momentum(-1.0);
    std::vector<std::uint8_t> labels;
    for (std::size_t s = 0; s < n; s += batch) {
      std::vector<std::size_t> idx;
      for (std::size_t i = s; i < std::min(n, s + batch); ++i) idx.push_back(i);
      typename SegmenterModel::Trace tr;
      model.forward_train(make_batch(idx, labels), tr);
    }
    model.set_bn_momentum(0.1);
  }

  if (files) {
    io::write_text(options.out_dir / "train_metrics.csv", train_metrics_csv(result.history));
    const int last = result.history.empty() ? 0 : result.history.back().epoch;
    write_checkpoint(options.out_dir / "segmenter", last);
    result.final_checkpoint = nn::checkpoint_stem(options.out_dir / "segmenter");
  }
  return result;
}

void save_segmenter(const std::filesystem::path& path, const SegmenterModel& model,
                    nn::CheckpointManifest manifest) {
  auto& m = const_cast<SegmenterModel&>(model);
  manifest.role_tag = kSegmenterRoleTag;
  manifest.config = model.config().to_json();
  manifest.seed = model.config().seed;
  nn::save_checkpoint(path, model_archive(m), manifest);
}

LoadedSegmenter load_segmenter(const std::filesystem::path& path) {
  auto ck = nn::load_checkpoint(path);
  if (ck.manifest.role_tag != kSegmenterRoleTag)
    throw FormatError(path.string() + " is a " + ck.manifest.role_tag +
                      " checkpoint, not a segmenter");
  LoadedSegmenter out{SegmenterModel(SegmenterConfig::from_json(ck.manifest.config)),
                      std::move(ck.manifest)};
  nn::restore_params(ck.archive, out.model.params());
  nn::restore_buffers(ck.archive, out.model.buffers());
  return out;
}

}  // namespace snowlens::segmenter
