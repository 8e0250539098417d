#include "snowlens/cli/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "snowlens/cli/run_config.hpp"
#include "snowlens/core/label_codec.hpp"
#include "snowlens/core/mask_ops.hpp"
#include "snowlens/error.hpp"
#include "snowlens/hazard/hazard.hpp"
#include "snowlens/ingest/dataset.hpp"
#include "snowlens/ingest/geometry.hpp"
#include "snowlens/io/image_io.hpp"
#include "snowlens/metrics/metrics.hpp"
#include "snowlens/report/plots.hpp"
#include "snowlens/report/reference.hpp"
#include "snowlens/segmenter/segmenter.hpp"
#include "snowlens/synth/synthfix.hpp"
#include "snowlens/translator/translator.hpp"

namespace snowlens::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Context {
  const RunConfig& rc;
  std::ostream& out;
  std::ostream& err;
};

void write_json(const fs::path& path, const json& j) { io::write_text(path, j.dump(2) + "\n"); }

fs::path prepare_out(const RunConfig& rc) {
  const fs::path out = rc.text("out");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create output directory " + out.string() + ": " + ec.message());
  return out;
}

void write_snapshot(const fs::path& out, const RunConfig& rc, const json& extra = json::object()) {
  json snap = rc.snapshot();
  for (const auto& [k, v] : extra.items()) snap[k] = v;
  write_json(out / "resolved_config.json", snap);
}

// Config errors raised by the model layers are usage errors at this level.
template <class F>
auto as_usage(F&& f) {
  try {
    return f();
  } catch (const ValueError& e) {
    throw UsageError(e.what());
  }
}

int positive_int(const RunConfig& rc, const std::string& name) {
  const auto v = rc.integer(name);
  if (v <= 0 || v > (1 << 30)) throw UsageError("--" + name + " must be a positive integer");
  return static_cast<int>(v);
}

int non_negative_int(const RunConfig& rc, const std::string& name) {
  const auto v = rc.integer(name);
  if (v < 0 || v > (1 << 30)) throw UsageError("--" + name + " must be a non-negative integer");
  return static_cast<int>(v);
}

std::set<std::string> load_split_ids(const fs::path& path) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::exception& e) {
    throw FormatError("cannot parse split file " + path.string() + ": " + e.what());
  }
  if (!j.contains("train") || !j["train"].is_array())
    throw FormatError("split file " + path.string() + " has no train id list");
  std::set<std::string> ids;
  for (const auto& v : j["train"]) ids.insert(v.get<std::string>());
  return ids;
}

template <class Sample>
std::vector<Sample> keep_ids(std::vector<Sample> samples, const std::optional<std::set<std::string>>& ids) {
  if (!ids) return samples;
  std::vector<Sample> kept;
  for (auto& s : samples)
    if (ids->count(s.id)) kept.push_back(std::move(s));
  if (kept.empty()) throw ValueError("the split file selects no sample of this dataset");
  return kept;
}

// A single image file or every image of a directory, keyed by id.
std::map<std::string, fs::path> list_inputs(const fs::path& input) {
  if (fs::is_directory(input)) {
    auto m = ingest::list_images(input);
    if (m.empty()) throw IoError("no images in " + input.string());
    return m;
  }
  if (!fs::is_regular_file(input)) throw IoError("input not found: " + input.string());
  return {{input.stem().string(), input}};
}

std::string progress_line(const char* what, int epoch, const json& fields) {
  std::string s = std::string(what) + " epoch " + std::to_string(epoch);
  for (const auto& [k, v] : fields.items()) s += " " + k + "=" + v.dump();
  return s;
}

ingest::PairedLayout layout_of(const RunConfig& rc) {
  return {rc.text("condition-dir"), rc.text("target-dir")};
}

ingest::DatasetKind kind_of(const RunConfig& rc) {
  return rc.text("kind") == "paired" ? ingest::DatasetKind::paired : ingest::DatasetKind::annotated;
}

ingest::SplitSpec split_spec_of(const RunConfig& rc) {
  const double f = rc.real("train-fraction");
  if (!(f > 0.0 && f <= 1.0)) throw UsageError("--train-fraction must lie in (0, 1]");
  return {f, rc.seed()};
}

// ---------------------------------------------------------------- commands

int cmd_synth(Context& c) {
  const auto& rc = c.rc;
  synth::SceneParams base;
  base.height = positive_int(rc, "height");
  base.width = positive_int(rc, "width");
  base.night_gain = rc.real("night-gain");
  base.noise_sigma = rc.real("noise-sigma");
  as_usage([&] { base.validate(); return 0; });
  const int n = positive_int(rc, "n");
  const fs::path out = prepare_out(rc);
  write_snapshot(out, rc);
  c.err << "synth: writing " << n << " scenes to " << out.string() << "\n";
  const auto summary = synth::generate_dataset(out, n, base, rc.seed());
  c.err << "synth: done (" << summary.count << " scenes)\n";
  return kExitOk;
}

int cmd_ingest(Context& c) {
  const auto& rc = c.rc;
  const auto kind = kind_of(rc);
  const auto layout = layout_of(rc);
  const auto spec = split_spec_of(rc);
  const fs::path root = rc.text("root");
  const fs::path out = prepare_out(rc);
  write_snapshot(out, rc);

  fs::path indexed = root;
  if (rc.flag("unify")) {
    const bool paired = kind == ingest::DatasetKind::paired;
    ingest::Size2 size = paired ? ingest::kUnifiedSize : ingest::kPaperAnnotationSize;
    if (rc.has("height")) size.height = positive_int(rc, "height");
    if (rc.has("width")) size.width = positive_int(rc, "width");
    if (paired) {
      const auto pairs = ingest::load_paired_dataset(root, layout);
      fs::create_directories(out / layout.condition_dir);
      fs::create_directories(out / layout.target_dir);
      for (const auto& p : pairs) {
        io::write_png(out / layout.condition_dir / (p.id + ".png"), ingest::unify_size(p.condition, size));
        io::write_png(out / layout.target_dir / (p.id + ".png"), ingest::unify_size(p.target, size));
      }
      c.err << "ingest: unified " << pairs.size() << " pairs to " << size.height << "x" << size.width << "\n";
    } else {
      const auto samples = ingest::load_annotated_dataset(root);
      fs::create_directories(out / "images");
      fs::create_directories(out / "masks");
      for (const auto& s : samples) {
        io::write_png(out / "images" / (s.id + ".png"), ingest::unify_size(s.image, size));
        write_label_mask(out / "masks" / (s.id + ".png"), resize_nearest(s.label, size.height, size.width));
      }
      c.err << "ingest: unified " << samples.size() << " annotated frames to " << size.height << "x"
            << size.width << "\n";
    }
    indexed = out;
  }
  json manifest = ingest::build_manifest(indexed, kind, spec, layout);
  manifest["layout"] = kind == ingest::DatasetKind::paired
                           ? json{{"condition", layout.condition_dir}, {"target", layout.target_dir}}
                           : json{{"image", "images"}, {"mask", "masks"}};
  manifest["unified"] = rc.flag("unify");
  write_json(out / "manifest.json", manifest);
  c.err << "ingest: " << manifest["samples"].size() << " samples indexed\n";
  return kExitOk;
}

int cmd_split(Context& c) {
  const auto& rc = c.rc;
  const auto kind = kind_of(rc);
  const auto layout = layout_of(rc);
  const auto spec = split_spec_of(rc);
  const fs::path out = prepare_out(rc);
  write_snapshot(out, rc);
  const json manifest = ingest::build_manifest(rc.text("root"), kind, spec, layout);
  json train = json::array(), test = json::array();
  for (const auto& s : manifest["samples"])
    (s["split"] == "train" ? train : test).push_back(s["id"]);
  const json split{{"kind", manifest["kind"]},
                   {"seed", spec.seed},
                   {"train_fraction", spec.train_fraction},
                   {"counts", {{"train", train.size()}, {"test", test.size()}}},
                   {"train", train},
                   {"test", test}};
  write_json(out / "manifest.json", manifest);
  write_json(out / "split.json", split);
  c.err << "split: " << train.size() << " train / " << test.size() << " test\n";
  return kExitOk;
}

int cmd_train_translate(Context& c) {
  const auto& rc = c.rc;
  const auto role = translator::parse_role(rc.text("role"));
  auto cfg = as_usage([&] { return translator::translator_preset(rc.text("preset"), role); });
  if (rc.has("epochs")) cfg.epochs = non_negative_int(rc, "epochs");
  if (rc.has("iterations")) cfg.max_iterations = non_negative_int(rc, "iterations");
  if (rc.has("batch-size")) cfg.batch_size = positive_int(rc, "batch-size");
  if (rc.has("lr")) cfg.lr = rc.real("lr");
  if (rc.has("lambda")) cfg.lambda_l1 = rc.real("lambda");
  if (rc.has("gan-mode"))
    cfg.gan_mode = rc.text("gan-mode") == "lsgan" ? translator::GanMode::lsgan : translator::GanMode::bce;
  if (rc.has("checkpoint-every")) cfg.checkpoint_every = positive_int(rc, "checkpoint-every");
  if (rc.has("height")) cfg.height = positive_int(rc, "height");
  if (rc.has("width")) cfg.width = positive_int(rc, "width");
  cfg.seed = rc.seed();
  as_usage([&] { cfg.validate(); return 0; });

  ingest::PairedLayout layout = role == translator::Role::U ? ingest::PairedLayout{"night", "day"}
                                                            : ingest::PairedLayout{"day", "surface"};
  if (rc.has("condition-dir")) layout.condition_dir = rc.text("condition-dir");
  if (rc.has("target-dir")) layout.target_dir = rc.text("target-dir");

  std::optional<std::set<std::string>> ids;
  if (rc.has("split")) ids = load_split_ids(rc.text("split"));
  auto pairs = keep_ids(ingest::load_paired_dataset(rc.text("data"), layout), ids);

  const fs::path out = prepare_out(rc);
  write_snapshot(out, rc,
                 {{"translator", cfg.to_json()},
                  {"layout", {{"condition", layout.condition_dir}, {"target", layout.target_dir}}},
                  {"samples", pairs.size()}});

  translator::TrainOptions opts;
  opts.out_dir = out;
  if (rc.has("resume")) opts.resume_from = fs::path(rc.text("resume"));
  std::ostream& err = c.err;
  opts.on_epoch = [&err](const translator::EpochRecord& r) {
    err << progress_line("train-translate", r.epoch,
                         {{"steps", r.steps},
                          {"d", r.mean.d_total},
                          {"g_gan", r.mean.g_gan},
                          {"l1", r.mean.g_l1},
                          {"g_total", r.mean.g_total}})
        << "\n";
    err.flush();
  };
  c.err << "train-translate: role " << translator::role_name(role) << ", " << pairs.size()
        << " pairs, " << cfg.height << "x" << cfg.width << "\n";
  try {
    const auto result = translator::train_translator(cfg, pairs, opts);
    c.err << "train-translate: wrote " << result.final_checkpoint.string() << "\n";
  } catch (const translator::TrainingDivergedError& e) {
    c.err << "train-translate: " << e.what() << "; last good checkpoint "
          << e.last_good_checkpoint().string() << "\n";
    return kExitDomain;
  }
  return kExitOk;
}

int cmd_train_segment(Context& c) {
  const auto& rc = c.rc;
  auto cfg = as_usage([&] { return segmenter::segmenter_preset(rc.text("preset")); });
  if (rc.has("epochs")) cfg.epochs = non_negative_int(rc, "epochs");
  if (rc.has("batch-size")) cfg.batch_size = positive_int(rc, "batch-size");
  if (rc.has("lr")) cfg.lr = rc.real("lr");
  if (rc.has("checkpoint-every")) cfg.checkpoint_every = positive_int(rc, "checkpoint-every");
  if (rc.flag("class-weighting")) cfg.class_weighting = true;
  cfg.seed = rc.seed();
  as_usage([&] { cfg.validate(); return 0; });

  std::optional<std::set<std::string>> ids;
  if (rc.has("split")) ids = load_split_ids(rc.text("split"));
  const auto frames = keep_ids(ingest::load_annotated_dataset(rc.text("data")), ids);
  const auto crops = segmenter::prepare_crops(frames, cfg);

  const fs::path out = prepare_out(rc);
  write_snapshot(out, rc, {{"segmenter", cfg.to_json()}, {"frames", frames.size()}, {"crops", crops.size()}});

  segmenter::SegTrainOptions opts;
  opts.out_dir = out;
  if (rc.has("resume")) opts.resume_from = fs::path(rc.text("resume"));
  if (rc.has("backbone-init")) opts.backbone_init = fs::path(rc.text("backbone-init"));
  std::ostream& err = c.err;
  opts.on_epoch = [&err](const segmenter::SegEpochRecord& r) {
    err << progress_line("train-segment", r.epoch,
                         {{"loss", r.loss}, {"pixel_accuracy", r.pixel_accuracy}, {"miou", r.miou}})
        << "\n";
    err.flush();
  };
  c.err << "train-segment: " << frames.size() << " frames, " << crops.size() << " crops of "
        << cfg.input_height << "x" << cfg.input_width << "\n";
  try {
    const auto result = segmenter::train_segmenter(cfg, crops, opts);
    c.err << "train-segment: wrote " << result.final_checkpoint.string() << "\n";
  } catch (const segmenter::SegmenterDivergedError& e) {
    c.err << "train-segment: " << e.what() << "; last good checkpoint "
          << e.last_good_checkpoint().string() << "\n";
    return kExitDomain;
  }
  return kExitOk;
}

int cmd_translate(Context& c) {
  const auto& rc = c.rc;
  const auto inputs = list_inputs(rc.text("input"));
  const auto loaded = translator::load_translator(rc.text("model"));
  const fs::path out = prepare_out(rc);
  write_snapshot(out, rc);
  translator::TranslateOptions opts;
  opts.restore_size = rc.flag("restore-size");
  json outputs = json::array();
  for (const auto& [id, path] : inputs) {
    const auto t = translator::translate(loaded.model, io::read_image(path), opts);
    const std::string name = id + ".png";
    const auto bytes = io::encode_png(t.image);
    io::write_file(out / name, bytes);
    outputs.push_back({{"id", id},
                       {"file", name},
                       {"height", t.image.height()},
                       {"width", t.image.width()},
                       {"resized", t.resized},
                       {"sha256", io::sha256_hex(bytes)}});
    c.err << "translate: " << id << "\n";
  }
  write_json(out / "translate.json", {{"model", {{"role_tag", loaded.manifest.role_tag},
                                                {"content_hash", loaded.manifest.content_hash}}},
                                     {"restore_size", opts.restore_size},
                                     {"outputs", outputs}});
  return kExitOk;
}

int cmd_segment(Context& c) {
  const auto& rc = c.rc;
  const auto inputs = list_inputs(rc.text("input"));
  const auto loaded = segmenter::load_segmenter(rc.text("model"));
  const auto& cfg = loaded.model.config();
  const fs::path out = prepare_out(rc);
  write_snapshot(out, rc);
  const auto& tax = ClassTaxonomy::canonical();
  json outputs = json::array();
  for (const auto& [id, path] : inputs) {
    const RgbImage img = io::read_image(path);
    const bool crop_sized = img.height() == cfg.input_height && img.width() == cfg.input_width;
    const LabelMap labels = crop_sized ? segmenter::segment(loaded.model, img)
                                       : segmenter::segment_frame(loaded.model, img);
    const std::string name = id + ".png";
    const auto bytes = encode_label_mask(labels);
    io::write_file(out / name, bytes);
    json counts = json::object();
    for (int k = 0; k < kNumClasses; ++k)
      counts[std::string(tax.at(k).name)] = class_mask(labels, k).popcount();
    json entry{{"id", id},
               {"file", name},
               {"height", labels.height()},
               {"width", labels.width()},
               {"mode", crop_sized ? "crop" : "frame"},
               {"class_pixels", counts},
               {"sha256", io::sha256_hex(bytes)}};
    if (rc.flag("overlay")) {
      // Kept apart so the output directory holds only label masks.
      const std::string oname = "overlays/" + id + ".png";
      fs::create_directories(out / "overlays");
      io::write_png(out / oname, overlay(img, labels, 0.5));
      entry["overlay"] = oname;
    }
    outputs.push_back(entry);
    c.err << "segment: " << id << "\n";
  }
  write_json(out / "segment.json", {{"model", {{"role_tag", loaded.manifest.role_tag},
                                              {"content_hash", loaded.manifest.content_hash}}},
                                   {"outputs", outputs}});
  return kExitOk;
}

// Label files of two directories matched by id; any unmatched id is an error.
std::vector<std::pair<std::string, std::pair<fs::path, fs::path>>> matched_labels(const fs::path& a,
                                                                                const fs::path& b) {
  const auto la = ingest::list_images(a);
  const auto lb = ingest::list_images(b);
  std::string orphans;
  for (const auto& [id, p] : la)
    if (!lb.count(id)) orphans += " " + id;
  for (const auto& [id, p] : lb)
    if (!la.count(id)) orphans += " " + id;
  if (!orphans.empty())
    throw FormatError("label directories " + a.string() + " and " + b.string() + " differ in ids:" + orphans);
  if (la.empty()) throw IoError("no label masks in " + a.string());
  std::vector<std::pair<std::string, std::pair<fs::path, fs::path>>> m;
  for (const auto& [id, p] : la) m.push_back({id, {p, lb.at(id)}});
  return m;
}

int cmd_eval_seg(Context& c) {
  const auto& rc = c.rc;
  const auto pairs = matched_labels(rc.text("pred"), rc.text("gt"));
  const auto avg = rc.text("f1") == "micro" ? metrics::F1Average::micro : metrics::F1Average::macro;
  const fs::path out = prepare_out(rc);
  write_snapshot(out, rc);
  metrics::ConfusionMatrix cm;
  for (const auto& [id, paths] : pairs) cm.accumulate(read_label_mask(paths.first), read_label_mask(paths.second));
  const auto report = metrics::summarize(cm, avg);
  write_json(out / "eval_seg.json",
             {{"images", pairs.size()},
              {"report", report.to_json()},
              {"confusion", cm.to_json()},
              {"reference", {{"mean_iou", reference::kMeanIoU},
                             {"mean_accuracy", reference::kMeanAccuracy},
                             {"mean_f1", reference::kMeanF1}}}});
  const auto& tax = ClassTaxonomy::canonical();
  std::string csv = "gt\\pred";
  for (int p = 0; p < kNumClasses; ++p) csv += "," + std::string(tax.at(p).name);
  csv += "\n";
  for (int g = 0; g < kNumClasses; ++g) {
    csv += std::string(tax.at(g).name);
    for (int p = 0; p < kNumClasses; ++p) csv += "," + std::to_string(cm.count(g, p));
    csv += "\n";
  }
  io::write_text(out / "confusion.csv", csv);
  c.err << "eval-seg: " << pairs.size() << " images, mIoU " << report.mean_iou << "\n";
  return kExitOk;
}

int cmd_eval_dice(Context& c) {
  const auto& rc = c.rc;
  const auto roi = as_usage([&] { return parse_class_list(rc.text("roi")); });
  if (roi.empty()) throw UsageError("--roi names no class");
  const auto pairs = matched_labels(rc.text("real-labels"), rc.text("fake-labels"));
  const fs::path out = prepare_out(rc);
  write_snapshot(out, rc);
  auto report = metrics::make_dice_report(roi);
  int resized = 0;
  for (const auto& [id, paths] : pairs) {
    const LabelMap real = read_label_mask(paths.first);
    LabelMap fake = read_label_mask(paths.second);
    // Fake-day labels kept at model size are compared on the real-label grid.
    if (fake.height() != real.height() || fake.width() != real.width()) {
      fake = resize_nearest(fake, real.height(), real.width());
      ++resized;
    }
    report.add(id, real, fake);
  }
  if (resized) c.err << "eval-dice: " << resized << " fake label maps resampled (nearest) to the real size\n";
  write_json(out / "dice.json", report.to_json());
  io::write_text(out / "dice.csv", report.to_csv());
  io::write_png(out / "dice_barplot.png", report::emit_dice_barplot(report));
  const auto& tax = ClassTaxonomy::canonical();
  for (int cls : roi)
    c.err << "eval-dice: " << tax.at(cls).name << " median " << report.median(cls) << " mean "
          << report.mean(cls) << "\n";
  return kExitOk;
}

int finish_hazard(Context& c, hazard::PipelineResult& result, const RgbImage& raw) {
  const auto& rc = c.rc;
  if (rc.has("out")) {
    const fs::path out = prepare_out(rc);
    hazard::persist_artifacts(result, out, fs::path(rc.text("image")).stem().string(), raw);
    write_json(out / "hazard.json", result.report.to_json());
  }
  c.out << result.report.to_json().dump(2) << "\n";
  if (result.report.no_road()) {
    c.err << "hazard: no-road\n";
    return kExitDomain;
  }
  c.err << "hazard index: " << result.report.display() << "\n";
  return kExitOk;
}

int cmd_hazard(Context& c) {
  const auto& rc = c.rc;
  if (rc.has("out")) write_snapshot(prepare_out(rc), rc);
  const RgbImage raw = io::read_image(rc.text("image"));
  const auto t = translator::load_translator(rc.text("t"), translator::Role::T);
  const auto s = segmenter::load_segmenter(rc.text("s"));
  auto result = hazard::day_hazard_pipeline(raw, t.model, s.model);
  return finish_hazard(c, result, raw);
}

int cmd_hazard_night(Context& c) {
  const auto& rc = c.rc;
  if (rc.has("out")) write_snapshot(prepare_out(rc), rc);
  const RgbImage raw = io::read_image(rc.text("image"));
  const auto u = translator::load_translator(rc.text("u"), translator::Role::U);
  const auto t = translator::load_translator(rc.text("t"), translator::Role::T);
  const auto s = segmenter::load_segmenter(rc.text("s"));
  auto result = hazard::night_hazard_pipeline(raw, u.model, t.model, s.model);
  return finish_hazard(c, result, raw);
}

int cmd_report(Context& c) {
  const auto& rc = c.rc;
  if (!rc.has("images") && !rc.has("dice-report"))
    throw UsageError("report needs --images and/or --dice-report");
  const fs::path out = prepare_out(rc);
  write_snapshot(out, rc);
  json summary = json::object();
  if (rc.has("images")) {
    const auto files = ingest::list_images(rc.text("images"));
    if (files.empty()) throw IoError("no images in " + rc.text("images"));
    std::vector<RgbImage> images;
    json ids = json::array();
    for (const auto& [id, p] : files) {
      images.push_back(io::read_image(p));
      ids.push_back(id);
    }
    const int rows = positive_int(rc, "rows"), cols = positive_int(rc, "cols");
    const auto bytes = io::encode_png(report::emit_montage(images, rows, cols));
    io::write_file(out / "montage.png", bytes);
    summary["montage"] = {{"file", "montage.png"}, {"rows", rows}, {"cols", cols},
                          {"images", ids}, {"sha256", io::sha256_hex(bytes)}};
  }
  if (rc.has("dice-report")) {
    json j;
    try {
      j = json::parse(io::read_file(rc.text("dice-report")));
    } catch (const json::exception& e) {
      throw FormatError("cannot parse dice report: " + std::string(e.what()));
    }
    const auto dr = metrics::DiceReport::from_json(j);
    const auto bytes = io::encode_png(report::emit_dice_barplot(dr));
    io::write_file(out / "dice_barplot.png", bytes);
    summary["dice_barplot"] = {{"file", "dice_barplot.png"}, {"bars", dr.entries.size()},
                               {"sha256", io::sha256_hex(bytes)}};
  }
  write_json(out / "report.json", summary);
  return kExitOk;
}

int dispatch(Context& c) {
  const auto& name = c.rc.command;
  if (name == "synth") return cmd_synth(c);
  if (name == "ingest") return cmd_ingest(c);
  if (name == "split") return cmd_split(c);
  if (name == "train-translate") return cmd_train_translate(c);
  if (name == "train-segment") return cmd_train_segment(c);
  if (name == "translate") return cmd_translate(c);
  if (name == "segment") return cmd_segment(c);
  if (name == "eval-seg") return cmd_eval_seg(c);
  if (name == "eval-dice") return cmd_eval_dice(c);
  if (name == "hazard") return cmd_hazard(c);
  if (name == "hazard-night") return cmd_hazard_night(c);
  if (name == "report") return cmd_report(c);
  throw UsageError("unknown command '" + name + "'");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"snowlens: winter road-scene translation, segmentation and snow-hazard tools", "snowlens"};
  app.require_subcommand(1, 1);
  std::map<std::string, std::map<std::string, std::string>> text_values;
  std::map<std::string, std::map<std::string, bool>> flag_values;
  std::map<std::string, std::vector<std::pair<std::string, CLI::Option*>>> bound;
  for (const auto& spec : command_specs()) {
    auto* sub = app.add_subcommand(spec.name, spec.help);
    for (const auto& o : spec.options) {
      const std::string env = " [env " + env_name(o.name) + "]";
      CLI::Option* opt = o.kind == OptKind::flag
                             ? sub->add_flag("--" + o.name, flag_values[spec.name][o.name], o.help + env)
                             : sub->add_option("--" + o.name, text_values[spec.name][o.name], o.help + env);
      bound[spec.name].push_back({o.name, opt});
    }
  }

  CLI::App* chosen = nullptr;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    chosen = app.get_subcommands().front();
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  const std::string command = chosen->get_name();
  try {
    std::map<std::string, std::string> flags;
    for (const auto& [name, opt] : bound[command]) {
      if (opt->count() == 0) continue;
      flags[name] = flag_values[command].count(name) ? "true" : text_values[command][name];
    }
    const RunConfig rc = resolve_config(command_spec(command), flags);
    Context ctx{rc, out, err};
    return dispatch(ctx);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n" << chosen->help();
    return kExitUsage;
  } catch (const hazard::NoRoadError& e) {
    out << e.report().to_json().dump(2) << "\n";
    err << "hazard: no-road\n";
    return kExitDomain;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace snowlens::cli
