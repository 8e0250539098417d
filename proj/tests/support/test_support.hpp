#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "snowlens/core/raster.hpp"
#include "snowlens/core/taxonomy.hpp"

namespace snowlens::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("snowlens_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

 private:
  std::filesystem::path path_;
};

inline LabelMap random_labels(int h, int w, std::mt19937_64& rng, int classes = kNumClasses) {
  std::uniform_int_distribution<int> d(0, classes - 1);
  LabelMap m(h, w);
  for (auto& v : m.labels()) v = static_cast<std::uint8_t>(d(rng));
  return m;
}

inline RgbImage random_image(int h, int w, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(0, 255);
  RgbImage img(h, w, Range::byte);
  for (auto& v : img.values()) v = static_cast<float>(d(rng));
  return img;
}

}  // namespace snowlens::testing
