#include "snowlens/hazard/hazard.hpp"

#include <cstdio>

#include "snowlens/core/label_codec.hpp"
#include "snowlens/core/mask_ops.hpp"
#include "snowlens/io/image_io.hpp"

namespace snowlens::hazard {

std::string_view source_tag(Source s) {
  return s == Source::day_direct ? "day-direct" : "night-composed";
}

nlohmann::json HazardReport::to_json() const {
  nlohmann::json j{{"road_pixels", road_pixels},
                   {"snow_over_road_pixels", snow_over_road_pixels},
                   {"source_tag", std::string(source_tag(source))},
                   {"artifacts", artifacts}};
  if (index) {
    j["verdict"] = "ok";
    j["index"] = *index;
  } else {
    j["verdict"] = "no-road";
    j["index"] = nullptr;
  }
  return j;
}

std::string HazardReport::display() const {
  if (!index) return "no-road";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", *index);
  return buf;
}

PixelMask snow_over_road(const LabelMap& scl, const LabelMap& rsl) {
  const LabelMap* s = &scl;
  LabelMap resized;
  if (scl.height() != rsl.height() || scl.width() != rsl.width()) {
    resized = resize_nearest(scl, rsl.height(), rsl.width());
    s = &resized;
  }
  return mask_intersection(class_mask(*s, static_cast<int>(ClassId::snow)),
                           class_mask(rsl, static_cast<int>(ClassId::road)));
}

HazardReport hazard_report(const LabelMap& scl, const LabelMap& rsl, Source source) {
  HazardReport r;
  r.source = source;
  r.road_pixels = class_mask(rsl, static_cast<int>(ClassId::road)).popcount();
  r.snow_over_road_pixels = snow_over_road(scl, rsl).popcount();
  if (r.road_pixels == 0) throw NoRoadError(r);
  r.index = 100.0 * double(r.snow_over_road_pixels) / double(r.road_pixels);
  return r;
}

double hazard_index(const LabelMap& scl, const LabelMap& rsl) {
  return *hazard_report(scl, rsl, Source::day_direct).index;
}

namespace {

PipelineResult run_day(const RgbImage& raw, const translator::TranslatorModel<float>& t,
                       const segmenter::SegmenterModel& s, Source source) {
  PipelineResult out;
  out.artifacts.surface = translator::translate(t, raw, {.restore_size = true}).image;
  out.artifacts.surface_labels = segmenter::segment_frame(s, out.artifacts.surface);
  out.artifacts.scene_labels = segmenter::segment_frame(s, raw);
  try {
    out.report = hazard_report(out.artifacts.scene_labels, out.artifacts.surface_labels, source);
  } catch (const NoRoadError& e) {
    out.report = e.report();
  }
  return out;
}

}  // namespace

PipelineResult day_hazard_pipeline(const RgbImage& raw_day,
                                   const translator::TranslatorModel<float>& t,
                                   const segmenter::SegmenterModel& s) {
  return run_day(raw_day, t, s, Source::day_direct);
}

PipelineResult night_hazard_pipeline(const RgbImage& night,
                                     const translator::TranslatorModel<float>& u,
                                     const translator::TranslatorModel<float>& t,
                                     const segmenter::SegmenterModel& s) {
  const RgbImage k = translator::translate(u, night, {.restore_size = true}).image;
  PipelineResult out = run_day(k, t, s, Source::night_composed);
  out.artifacts.fake_day = k;
  return out;
}

void persist_artifacts(PipelineResult& result, const std::filesystem::path& dir,
                       const std::string& stem, const RgbImage& raw) {
  auto& a = result.artifacts;
  auto& j = result.report.artifacts;
  auto put_image = [&](const std::string& key, const RgbImage& img) {
    const std::string name = stem + "_" + key + ".png";
    io::write_png(dir / name, img);
    j[key] = name;
  };
  auto put_labels = [&](const std::string& key, const LabelMap& l) {
    const std::string name = stem + "_" + key + ".png";
    write_label_mask(dir / name, l);
    j[key] = name;
  };
  if (!a.fake_day.empty()) put_image("K", a.fake_day);
  put_image("F", a.surface);
  put_labels("RsL", a.surface_labels);
  put_labels("ScL", a.scene_labels);
  if (!result.report.no_road()) {
    const PixelMask roi = snow_over_road(a.scene_labels, a.surface_labels);
    put_image("overlay", overlay_mask(raw.range() == Range::byte ? raw : raw.to_byte(), roi,
                                      Rgb{255, 0, 0}, 0.5));
  }
}

}  // namespace snowlens::hazard
