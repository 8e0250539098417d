#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "snowlens/core/raster.hpp"
#include "snowlens/error.hpp"
#include "snowlens/segmenter/segmenter.hpp"
#include "snowlens/translator/translator.hpp"

namespace snowlens::hazard {

enum class Source { day_direct, night_composed };
std::string_view source_tag(Source s);

struct HazardReport {
  std::uint64_t road_pixels = 0;
  std::uint64_t snow_over_road_pixels = 0;
  std::optional<double> index;  // empty on the no-road verdict
  Source source = Source::day_direct;
  // Stage artifacts (relative paths once persisted).
  nlohmann::json artifacts = nlohmann::json::object();

  bool no_road() const { return !index.has_value(); }
  nlohmann::json to_json() const;
  // "34.2" or "no-road".
  std::string display() const;
};

// Zero road pixels in the road-surface labels. Carries the partial report.
class NoRoadError : public Error {
 public:
  explicit NoRoadError(HazardReport report)
      : Error("no-road: the road-surface labels contain no road pixels"), report_(std::move(report)) {}
  const HazardReport& report() const { return report_; }

 private:
  HazardReport report_;
};

// snow(ScL) AND road(RsL). If the rasters differ in size, ScL is resampled
// (nearest) to RsL first.
PixelMask snow_over_road(const LabelMap& scl, const LabelMap& rsl);

// 100 * |snow over road| / |road in RsL|. Throws NoRoadError on zero road.
double hazard_index(const LabelMap& scl, const LabelMap& rsl);

// Report form of hazard_index; also throws NoRoadError.
HazardReport hazard_report(const LabelMap& scl, const LabelMap& rsl, Source source);

struct PipelineArtifacts {
  RgbImage fake_day;      // K (night pipeline only)
  RgbImage surface;       // F
  LabelMap surface_labels;  // RsL
  LabelMap scene_labels;    // ScL
};

struct PipelineResult {
  HazardReport report;
  PipelineArtifacts artifacts;
};

// F = T(raw), RsL = S(F), ScL = S(raw). Whole frames go through
// segment_frame. A no-road verdict is returned (not thrown) with the
// artifacts attached.
PipelineResult day_hazard_pipeline(const RgbImage& raw_day,
                                   const translator::TranslatorModel<float>& t,
                                   const segmenter::SegmenterModel& s);

// K = U(night), then the day pipeline on K; source tag night-composed.
PipelineResult night_hazard_pipeline(const RgbImage& night,
                                     const translator::TranslatorModel<float>& u,
                                     const translator::TranslatorModel<float>& t,
                                     const segmenter::SegmenterModel& s);

// Writes the stage rasters next to `stem` (stem_F.png, stem_RsL.png, ...)
// and records their file names in report.artifacts.
void persist_artifacts(PipelineResult& result, const std::filesystem::path& dir,
                       const std::string& stem, const RgbImage& raw);

}  // namespace snowlens::hazard
