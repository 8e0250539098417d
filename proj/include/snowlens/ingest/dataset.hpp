#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "snowlens/core/raster.hpp"
#include "snowlens/error.hpp"

namespace snowlens::ingest {

// A fixed-camera pair. For the night-to-day translator the condition is the
// night frame N and the target the day frame J; for the snow-removal
// translator they are the snowy day frame and the road-surface frame.
struct PairedSample {
  std::string id;
  RgbImage condition;
  RgbImage target;
};

struct AnnotatedSample {
  std::string id;
  RgbImage image;
  LabelMap label;
};

struct PairedLayout {
  std::string condition_dir = "night";
  std::string target_dir = "day";
};

struct SplitSpec {
  double train_fraction = 0.9;
  std::uint64_t seed = 0;
};

// Files named <id>.png / <id>.jpg / <id>.jpeg in `dir`, keyed by id.
std::map<std::string, std::filesystem::path> list_images(const std::filesystem::path& dir);

// Loads <root>/<condition_dir>/<id>.* against <root>/<target_dir>/<id>.*,
// sorted by id. Unmatched files raise FormatError listing every orphan id;
// a pair whose two frames differ in size raises DimensionError.
std::vector<PairedSample> load_paired_dataset(const std::filesystem::path& root,
                                              const PairedLayout& layout = {});

// Loads <root>/images/<id>.png with <root>/masks/<id>.png.
std::vector<AnnotatedSample> load_annotated_dataset(const std::filesystem::path& root);

// round-half-up(train_fraction * n)
std::size_t train_count(std::size_t n, double train_fraction);

// Seeded permutation of 0..n-1; the first train_count entries form the
// training split.
std::vector<std::size_t> split_permutation(std::size_t n, const SplitSpec& spec);

template <class T>
std::pair<std::vector<T>, std::vector<T>> split(const std::vector<T>& samples, const SplitSpec& spec) {
  if (samples.empty()) throw ValueError("cannot split an empty sample list");
  const auto order = split_permutation(samples.size(), spec);
  const std::size_t n_train = train_count(samples.size(), spec.train_fraction);
  std::pair<std::vector<T>, std::vector<T>> out;
  out.first.reserve(n_train);
  out.second.reserve(samples.size() - n_train);
  for (std::size_t i = 0; i < order.size(); ++i)
    (i < n_train ? out.first : out.second).push_back(samples[order[i]]);
  return out;
}

enum class DatasetKind { paired, annotated };

// Manifest JSON: seed, split fractions, and per sample its relative file
// paths, split tag and SHA-256 content hashes.
nlohmann::json build_manifest(const std::filesystem::path& root, DatasetKind kind,
                              const SplitSpec& spec, const PairedLayout& layout = {});

// Re-hashes every file named in the manifest; throws FormatError on mismatch.
void verify_manifest(const nlohmann::json& manifest, const std::filesystem::path& root);

}  // namespace snowlens::ingest
