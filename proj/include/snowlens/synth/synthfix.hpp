#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "snowlens/core/raster.hpp"

namespace snowlens::synth {

struct SceneParams {
  int height = 192;
  int width = 288;
  double snow_coverage = 0.3;  // fraction of road pixels under snow
  int pole_count = 2;
  double horizon = 0.38;       // horizon row as a fraction of height
  double road_offset = 0.0;    // horizontal shift of the road base, fraction of width
  double night_gain = 0.35;    // brightness multiplier in (0, 1]
  double noise_sigma = 4.0;    // night sensor noise, byte units
  std::uint64_t seed = 0;

  // Throws ValueError when a field is out of range.
  void validate() const;
  nlohmann::json to_json() const;
};

struct Scene {
  RgbImage day;            // J, snowy scene in daylight
  RgbImage night;          // N
  RgbImage surface;        // the same scene without snow (road-surface target)
  LabelMap label;          // exact labels of `day`
  LabelMap surface_label;  // exact labels of `surface`
  std::uint64_t road_pixels = 0;            // road incl. snow-covered road
  std::uint64_t snow_over_road_pixels = 0;  // snow placed on the road
};

// Road trapezoid from the bottom edge to the horizon, sky above, a distant
// background band, green shoulders, thin poles with signs, and elliptical
// snow blobs on the road until round(coverage * road) pixels are covered.
Scene generate_scene(const SceneParams& params);

struct DatasetSummary {
  int count = 0;
  nlohmann::json manifest;
};

// Writes n scenes with per-scene randomized coverage, pole count, horizon and
// road offset:
//   night/ day/        paired layout for the night->day translator
//   day/ surface/      paired layout for the snow-removal translator
//   images/ masks/     annotated layout (images are the day frames)
//   surface_masks/     labels of the snow-free frames
//   manifest.json      per-scene parameters, counts and ground-truth index
// The ground-truth index is 100 * snow-over-road / road computed from
// (masks, surface_masks).
DatasetSummary generate_dataset(const std::filesystem::path& root, int n, const SceneParams& base,
                                std::uint64_t seed);

std::string scene_id(int index);

}  // namespace snowlens::synth
