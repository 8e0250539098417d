#include "snowlens/synth/synthfix.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "snowlens/core/label_codec.hpp"
#include "snowlens/core/seed.hpp"
#include "snowlens/core/taxonomy.hpp"
#include "snowlens/error.hpp"
#include "snowlens/hazard/hazard.hpp"
#include "snowlens/io/image_io.hpp"

namespace snowlens::synth {

namespace {

constexpr std::uint8_t kRoad = static_cast<std::uint8_t>(ClassId::road);
constexpr std::uint8_t kPole = static_cast<std::uint8_t>(ClassId::pole_sign);
constexpr std::uint8_t kGreen = static_cast<std::uint8_t>(ClassId::green);
constexpr std::uint8_t kSnow = static_cast<std::uint8_t>(ClassId::snow);
constexpr std::uint8_t kSky = static_cast<std::uint8_t>(ClassId::sky);
constexpr std::uint8_t kBackground = static_cast<std::uint8_t>(ClassId::background);

void put(RgbImage& img, int y, int x, double r, double g, double b) {
  img.at(y, x, 0) = static_cast<float>(std::clamp(std::round(r), 0.0, 255.0));
  img.at(y, x, 1) = static_cast<float>(std::clamp(std::round(g), 0.0, 255.0));
  img.at(y, x, 2) = static_cast<float>(std::clamp(std::round(b), 0.0, 255.0));
}

void shade_surface(RgbImage& img, int y, int x, std::uint8_t cls, int h, int w, int horizon) {
  const double fy = double(y) / h;
  const double fx = double(x) / w;
  switch (cls) {
    case kSky: put(img, y, x, 90 + 60 * fy, 140 + 50 * fy, 200 + 30 * fy); break;
    case kBackground: put(img, y, x, 95 + 20 * fx, 80 + 10 * fx, 70); break;
    case kGreen: {
      const double d = double(y - horizon) / std::max(1, h - horizon);
      put(img, y, x, 60 + 30 * d, 110 + 40 * d, 40 + 10 * d);
      break;
    }
    case kRoad: {
      const double d = double(y - horizon) / std::max(1, h - horizon);
      put(img, y, x, 70 + 25 * d, 70 + 25 * d, 75 + 25 * d);
      break;
    }
    case kPole: put(img, y, x, 150, 150, 155); break;
    default: put(img, y, x, 0, 0, 0);
  }
}

}  // namespace

void SceneParams::validate() const {
  if (height < 16 || width < 16) throw ValueError("scene canvas must be at least 16x16");
  if (!(snow_coverage >= 0 && snow_coverage <= 1)) throw ValueError("snow_coverage must lie in [0, 1]");
  if (pole_count < 0 || pole_count > 16) throw ValueError("pole_count must lie in 0..16");
  if (!(horizon >= 0.1 && horizon <= 0.7)) throw ValueError("horizon must lie in [0.1, 0.7]");
  if (!(road_offset >= -0.3 && road_offset <= 0.3)) throw ValueError("road_offset must lie in [-0.3, 0.3]");
  if (!(night_gain > 0 && night_gain <= 1)) throw ValueError("night_gain must lie in (0, 1]");
  if (!(noise_sigma >= 0)) throw ValueError("noise_sigma must be nonnegative");
}

nlohmann::json SceneParams::to_json() const {
  return {{"height", height},           {"width", width},
          {"snow_coverage", snow_coverage}, {"pole_count", pole_count},
          {"horizon", horizon},         {"road_offset", road_offset},
          {"night_gain", night_gain},   {"noise_sigma", noise_sigma},
          {"seed", seed}};
}

Scene generate_scene(const SceneParams& p) {
  p.validate();
  const int h = p.height;
  const int w = p.width;
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const int horizon = static_cast<int>(std::lround(p.horizon * h));
  const int band = std::max(2, h / 12);
  const int road_top = horizon + band;
  const double base_center = w * (0.5 + p.road_offset);
  const double base_half = w * 0.42;
  const double top_center = w * 0.5;
  const double top_half = w * 0.04;

  Scene s;
  s.surface_label = LabelMap(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::uint8_t cls;
      if (y < horizon) {
        cls = kSky;
      } else if (y < road_top) {
        cls = kBackground;
      } else {
        const double t = double(y - road_top) / std::max(1, h - 1 - road_top);
        const double c = top_center + t * (base_center - top_center);
        const double half = top_half + t * (base_half - top_half);
        cls = std::abs(x + 0.5 - c) <= half ? kRoad : kGreen;
      }
      s.surface_label.at(y, x) = cls;
    }
  }

  // Poles stand on the shoulders and rise above the horizon.
  std::vector<std::uint8_t> sign_panel(static_cast<std::size_t>(h) * w, 0);
  const int pole_w = std::max(2, w / 96);
  const int sign = std::max(4, w / 32);
  for (int i = 0; i < p.pole_count; ++i) {
    const bool left = i % 2 == 0;
    const int ground = road_top + static_cast<int>((0.15 + 0.6 * unit(rng)) * (h - road_top));
    const double t = double(ground - road_top) / std::max(1, h - 1 - road_top);
    const double c = top_center + t * (base_center - top_center);
    const double half = top_half + t * (base_half - top_half);
    const int gap = 3 + static_cast<int>(unit(rng) * w * 0.06);
    int x0 = left ? static_cast<int>(c - half) - gap - pole_w : static_cast<int>(c + half) + gap;
    x0 = std::clamp(x0, 0, w - pole_w);
    const int top = std::max(0, horizon - static_cast<int>((0.1 + 0.2 * unit(rng)) * h));
    for (int y = top; y <= ground && y < h; ++y)
      for (int x = x0; x < x0 + pole_w; ++x)
        if (s.surface_label.at(y, x) != kRoad) s.surface_label.at(y, x) = kPole;
    const int sx0 = std::clamp(x0 + pole_w / 2 - sign / 2, 0, w - sign);
    for (int y = top; y < std::min(h, top + sign); ++y)
      for (int x = sx0; x < sx0 + sign; ++x)
        if (s.surface_label.at(y, x) != kRoad) {
          s.surface_label.at(y, x) = kPole;
          sign_panel[static_cast<std::size_t>(y) * w + x] = 1;
        }
  }

  s.surface = RgbImage(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (sign_panel[static_cast<std::size_t>(y) * w + x]) put(s.surface, y, x, 225, 200, 40);
      else shade_surface(s.surface, y, x, s.surface_label.at(y, x), h, w, horizon);
    }
  // Snow blobs on the road.
  s.label = s.surface_label;
  std::vector<std::pair<int, int>> road;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (s.surface_label.at(y, x) == kRoad) road.emplace_back(y, x);
  s.road_pixels = road.size();
  const std::uint64_t target =
      static_cast<std::uint64_t>(std::llround(p.snow_coverage * double(road.size())));
  std::uint64_t placed = 0;
  auto cover = [&](int y, int x) {
    if (placed < target && s.label.at(y, x) == kRoad) {
      s.label.at(y, x) = kSnow;
      ++placed;
    }
  };
  if (!road.empty() && target > 0) {
    const double scale = std::sqrt(double(road.size())) * 0.12;
    for (int attempt = 0; attempt < 4000 && placed < target; ++attempt) {
      const auto [cy, cx] = road[static_cast<std::size_t>(unit(rng) * road.size()) % road.size()];
      const double depth = double(cy - road_top + 1) / std::max(1, h - road_top);
      const double ry = std::max(1.5, scale * (0.4 + 0.8 * unit(rng)) * (0.4 + depth));
      const double rx = ry * (1.5 + 1.5 * unit(rng));
      for (int y = std::max(0, int(cy - ry)); y <= std::min(h - 1, int(cy + ry)); ++y)
        for (int x = std::max(0, int(cx - rx)); x <= std::min(w - 1, int(cx + rx)); ++x) {
          const double dy = (y - cy) / ry;
          const double dx = (x - cx) / rx;
          if (dx * dx + dy * dy <= 1.0) cover(y, x);
        }
    }
    for (const auto& [y, x] : road) cover(y, x);
  }
  s.snow_over_road_pixels = placed;

  s.day = s.surface;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (s.label.at(y, x) == kSnow) {
        const double d = double(y - road_top) / std::max(1, h - road_top);
        put(s.day, y, x, 225 + 20 * d, 230 + 18 * d, 240 + 12 * d);
      }

  s.night = RgbImage(h, w);
  std::normal_distribution<double> noise(0.0, p.noise_sigma);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        const double lit = std::clamp(s.day.at(y, x, c) * p.night_gain, 0.0, 255.0);
        const double v = p.noise_sigma > 0 ? lit + noise(rng) : lit;
        s.night.at(y, x, c) = static_cast<float>(std::clamp(std::round(v), 0.0, 255.0));
      }
  return s;
}

std::string scene_id(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "scene_%04d", index);
  return buf;
}

DatasetSummary generate_dataset(const std::filesystem::path& root, int n, const SceneParams& base,
                                std::uint64_t seed) {
  if (n < 1) throw ValueError("generate_dataset: n must be at least 1");
  base.validate();
  DatasetSummary out;
  out.count = n;
  auto scenes = nlohmann::json::array();
  for (int i = 0; i < n; ++i) {
    SceneParams p = base;
    p.seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    std::mt19937_64 rng(derive_seed(p.seed, 0x5ce7e));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    p.snow_coverage = std::round(unit(rng) * 0.9 * 1000.0) / 1000.0;
    p.pole_count = static_cast<int>(unit(rng) * 4.0);
    p.horizon = 0.3 + 0.15 * unit(rng);
    p.road_offset = -0.12 + 0.24 * unit(rng);
    const Scene s = generate_scene(p);
    const std::string id = scene_id(i);
    const std::string file = id + ".png";
    io::write_png(root / "night" / file, s.night);
    io::write_png(root / "day" / file, s.day);
    io::write_png(root / "images" / file, s.day);
    io::write_png(root / "surface" / file, s.surface);
    write_label_mask(root / "masks" / file, s.label);
    write_label_mask(root / "surface_masks" / file, s.surface_label);
    const double index = hazard::hazard_index(s.label, s.surface_label);
    scenes.push_back({{"id", id},
                      {"params", p.to_json()},
                      {"road_pixels", s.road_pixels},
                      {"snow_over_road_pixels", s.snow_over_road_pixels},
                      {"hazard_index", index}});
  }
  out.manifest = {{"generator", "snowlens-synthfix"},
                  {"seed", seed},
                  {"count", n},
                  {"base_params", base.to_json()},
                  {"layouts",
                   {{"night_to_day", {{"condition", "night"}, {"target", "day"}}},
                    {"snow_removal", {{"condition", "day"}, {"target", "surface"}}},
                    {"annotated", {{"images", "images"}, {"masks", "masks"}}}}},
                  {"scenes", scenes}};
  io::write_text(root / "manifest.json", out.manifest.dump(2) + "\n");
  return out;
}

}  // namespace snowlens::synth
