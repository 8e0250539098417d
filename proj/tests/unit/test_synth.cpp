#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "snowlens/core/label_codec.hpp"
#include "snowlens/core/mask_ops.hpp"
#include "snowlens/error.hpp"
#include "snowlens/hazard/hazard.hpp"
#include "snowlens/ingest/dataset.hpp"
#include "snowlens/io/image_io.hpp"
#include "snowlens/synth/synthfix.hpp"
#include "test_support.hpp"

namespace snowlens::synth {
namespace {

constexpr int kRoad = 0, kPole = 1, kSnow = 3;

TEST(Synth, CoverageWithinTwoPercent) {
  for (double cov : {0.0, 0.1, 0.3, 0.55, 0.9, 1.0}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      SceneParams p;
      p.snow_coverage = cov;
      p.seed = seed;
      const auto s = generate_scene(p);
      ASSERT_GT(s.road_pixels, 0u);
      const double actual = double(s.snow_over_road_pixels) / double(s.road_pixels);
      EXPECT_NEAR(actual, cov, 0.02) << "coverage " << cov << " seed " << seed;
    }
  }
}

TEST(Synth, LabelsAgreeWithCounts) {
  SceneParams p;
  p.snow_coverage = 0.4;
  p.seed = 11;
  const auto s = generate_scene(p);
  EXPECT_EQ(class_mask(s.surface_label, kRoad).popcount(), s.road_pixels);
  EXPECT_EQ(mask_intersection(class_mask(s.label, kSnow), class_mask(s.surface_label, kRoad)).popcount(),
            s.snow_over_road_pixels);
  EXPECT_DOUBLE_EQ(hazard::hazard_index(s.label, s.surface_label),
                   100.0 * double(s.snow_over_road_pixels) / double(s.road_pixels));
  // No snow on the snow-free frame, and poles never stand on the road.
  EXPECT_EQ(class_mask(s.surface_label, kSnow).popcount(), 0u);
  EXPECT_EQ(mask_intersection(class_mask(s.surface_label, kPole), class_mask(s.surface_label, kRoad)).popcount(),
            0u);
  // The day frame differs from the surface frame only where snow was placed.
  for (int y = 0; y < s.day.height(); ++y)
    for (int x = 0; x < s.day.width(); ++x)
      if (s.label.at(y, x) != kSnow) {
        EXPECT_EQ(s.label.at(y, x), s.surface_label.at(y, x));
      }
}

TEST(Synth, NightIsGainPlusNoise) {
  SceneParams p;
  p.seed = 5;
  p.noise_sigma = 0.0;
  p.night_gain = 0.4;
  const auto s = generate_scene(p);
  for (std::size_t i = 0; i < s.day.values().size(); ++i)
    ASSERT_EQ(s.night.values()[i], std::round(std::clamp(s.day.values()[i] * 0.4, 0.0, 255.0)));
  p.noise_sigma = 4.0;
  const auto noisy = generate_scene(p);
  double diff = 0, sq = 0;
  const std::size_t n = noisy.day.values().size();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = noisy.night.values()[i] - s.night.values()[i];
    diff += d;
    sq += d * d;
  }
  EXPECT_NEAR(diff / n, 0.0, 0.5);
  EXPECT_NEAR(std::sqrt(sq / n), 4.0, 1.0);
}

TEST(Synth, DeterministicInSeed) {
  SceneParams p;
  p.seed = 9;
  const auto a = generate_scene(p);
  const auto b = generate_scene(p);
  EXPECT_EQ(a.day, b.day);
  EXPECT_EQ(a.night, b.night);
  EXPECT_EQ(a.label, b.label);
  p.seed = 10;
  EXPECT_NE(generate_scene(p).day, a.day);
}

TEST(Synth, RejectsBadParams) {
  SceneParams p;
  p.snow_coverage = 1.5;
  EXPECT_THROW(generate_scene(p), ValueError);
  p = {};
  p.night_gain = 0;
  EXPECT_THROW(generate_scene(p), ValueError);
}

TEST(Synth, DatasetTreeAndManifest) {
  testing::TempDir dir("synth");
  SceneParams base;
  base.height = 64;
  base.width = 96;
  const auto summary = generate_dataset(dir.path(), 4, base, 7);
  EXPECT_EQ(summary.count, 4);
  for (const char* sub : {"night", "day", "images", "masks", "surface", "surface_masks"})
    EXPECT_EQ(ingest::list_images(dir / sub).size(), 4u) << sub;
  EXPECT_EQ(ingest::load_paired_dataset(dir.path()).size(), 4u);
  EXPECT_EQ(ingest::load_paired_dataset(dir.path(), {"day", "surface"}).size(), 4u);
  EXPECT_EQ(ingest::load_annotated_dataset(dir.path()).size(), 4u);

  std::ifstream in(dir / "manifest.json");
  const auto m = nlohmann::json::parse(in);
  ASSERT_EQ(m["scenes"].size(), 4u);
  for (const auto& sc : m["scenes"]) {
    const std::string id = sc["id"];
    const auto label = read_label_mask(dir / "masks" / (id + ".png"));
    const auto surface = read_label_mask(dir / "surface_masks" / (id + ".png"));
    EXPECT_DOUBLE_EQ(sc["hazard_index"].get<double>(), hazard::hazard_index(label, surface));
    EXPECT_TRUE(sc.contains("params"));
  }
  testing::TempDir again("synth2");
  generate_dataset(again.path(), 4, base, 7);
  EXPECT_EQ(io::read_file(dir / "manifest.json"), io::read_file(again / "manifest.json"));
  EXPECT_EQ(io::read_file(dir / "night/scene_0002.png"), io::read_file(again / "night/scene_0002.png"));
}

}  // namespace
}  // namespace snowlens::synth
