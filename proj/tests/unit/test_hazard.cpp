#include <gtest/gtest.h>

#include "snowlens/error.hpp"
#include "snowlens/hazard/hazard.hpp"
#include "test_support.hpp"

namespace snowlens::hazard {
namespace {

constexpr std::uint8_t kRoad = 0, kSnow = 3, kSky = 4;

TEST(Hazard, FullyCoveredRoadIsHundred) {
  LabelMap rsl(10, 10, kRoad);
  LabelMap scl(10, 10, kSnow);
  EXPECT_DOUBLE_EQ(hazard_index(scl, rsl), 100.0);
}

TEST(Hazard, NoSnowIsZero) {
  LabelMap rsl(10, 10, kRoad);
  LabelMap scl(10, 10, kRoad);
  EXPECT_DOUBLE_EQ(hazard_index(scl, rsl), 0.0);
}

TEST(Hazard, QuarterCoverage) {
  LabelMap rsl(20, 20, kSky);
  LabelMap scl(20, 20, kSky);
  for (int i = 0; i < 200; ++i) rsl.labels()[i] = kRoad;
  for (int i = 0; i < 50; ++i) scl.labels()[i * 4] = kSnow;
  for (int i = 300; i < 340; ++i) scl.labels()[i] = kSnow;  // snow off the road does not count
  const auto r = hazard_report(scl, rsl, Source::day_direct);
  EXPECT_EQ(r.road_pixels, 200u);
  EXPECT_EQ(r.snow_over_road_pixels, 50u);
  EXPECT_DOUBLE_EQ(*r.index, 25.0);
  EXPECT_EQ(r.display(), "25.0");
  EXPECT_EQ(r.to_json()["verdict"], "ok");
  EXPECT_EQ(r.to_json()["source_tag"], "day-direct");
}

TEST(Hazard, MonotoneUnderSingleFlips) {
  std::mt19937_64 rng(1);
  const auto rsl = testing::random_labels(16, 16, rng);
  auto scl = testing::random_labels(16, 16, rng);
  std::uniform_int_distribution<int> pos(0, 255);
  double prev = hazard_index(scl, rsl);
  for (int i = 0; i < 100; ++i) {
    const int p = pos(rng);
    const bool on_road = rsl.labels()[p] == kRoad;
    const bool was_snow = scl.labels()[p] == kSnow;
    scl.labels()[p] = was_snow ? kSky : kSnow;
    const double now = hazard_index(scl, rsl);
    if (!on_road) EXPECT_DOUBLE_EQ(now, prev);
    else if (was_snow) EXPECT_LT(now, prev);
    else EXPECT_GT(now, prev);
    prev = now;
  }
}

TEST(Hazard, ZeroRoadRaisesNoRoad) {
  LabelMap rsl(4, 4, kSky);
  LabelMap scl(4, 4, kSnow);
  EXPECT_THROW(hazard_index(scl, rsl), NoRoadError);
  try {
    hazard_report(scl, rsl, Source::night_composed);
  } catch (const NoRoadError& e) {
    EXPECT_TRUE(e.report().no_road());
    EXPECT_EQ(e.report().to_json()["verdict"], "no-road");
    EXPECT_EQ(e.report().display(), "no-road");
  }
}

TEST(Hazard, SceneLabelsResampledNearestToRoadGrid) {
  LabelMap rsl(4, 4, kRoad);
  LabelMap scl(2, 2, std::vector<std::uint8_t>{kSnow, kSky, kSky, kSky});
  EXPECT_DOUBLE_EQ(hazard_index(scl, rsl), 25.0);
  EXPECT_EQ(snow_over_road(scl, rsl).popcount(), 4u);
}

TEST(Hazard, JsonKeepsFullPrecision) {
  LabelMap rsl(1, 3, kRoad);
  LabelMap scl(1, 3, std::vector<std::uint8_t>{kSnow, kSky, kSky});
  const auto r = hazard_report(scl, rsl, Source::day_direct);
  EXPECT_EQ(r.to_json()["index"].get<double>(), 100.0 / 3.0);
  EXPECT_EQ(r.display(), "33.3");
}

}  // namespace
}  // namespace snowlens::hazard
