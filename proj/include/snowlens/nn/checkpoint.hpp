#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "snowlens/nn/optim.hpp"
#include "snowlens/nn/tensor.hpp"

namespace snowlens::nn {

// Ordered collection of named float32 tensors with a flat binary encoding:
//   "SNWLTNSR" u32 version u32 count
//   per tensor: u32 name_len, name, i32 n,c,h,w, float32 values (little endian)
class TensorArchive {
 public:
  void put(const std::string& name, const Tensor<float>& t);
  bool has(const std::string& name) const { return entries_.count(name) != 0; }
  // Throws FormatError when missing.
  const Tensor<float>& get(const std::string& name) const;
  // Copies into dst; throws DimensionError on a shape mismatch.
  void restore(const std::string& name, Tensor<float>& dst) const;
  std::vector<std::string> names() const;
  std::size_t size() const { return entries_.size(); }

  std::vector<std::uint8_t> serialize() const;
  static TensorArchive parse(std::span<const std::uint8_t> bytes);

  bool operator==(const TensorArchive&) const = default;

 private:
  std::map<std::string, Tensor<float>> entries_;
};

template <class T>
bool operator==(const Tensor<T>& a, const Tensor<T>& b) {
  return a.same_shape(b) && a.data == b.data;
}

struct CheckpointManifest {
  std::string role_tag;
  nlohmann::json config;
  int epoch = 0;
  std::int64_t optimizer_steps = 0;
  nlohmann::json loss_curve = nlohmann::json::array();
  std::uint64_t seed = 0;
  std::string content_hash;  // sha256 of the .bin payload

  nlohmann::json to_json() const;
  static CheckpointManifest from_json(const nlohmann::json& j);
};

// "run/ckpt" and "run/ckpt.json" both name the pair run/ckpt.bin + run/ckpt.json.
std::filesystem::path checkpoint_stem(const std::filesystem::path& path);

// Writes <stem>.bin and <stem>.json; fills manifest.content_hash.
void save_checkpoint(const std::filesystem::path& path, const TensorArchive& archive,
                     CheckpointManifest& manifest);

struct LoadedCheckpoint {
  TensorArchive archive;
  CheckpointManifest manifest;
};

// Verifies the payload hash against the manifest.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

void archive_params(TensorArchive& ar, const std::vector<Param<float>*>& params);
void restore_params(const TensorArchive& ar, const std::vector<Param<float>*>& params);
void archive_buffers(TensorArchive& ar, const std::vector<Buffer<float>>& buffers);
void restore_buffers(const TensorArchive& ar, const std::vector<Buffer<float>>& buffers);
// Moments are stored as "<prefix>.m/<param>" and "<prefix>.v/<param>".
void archive_adam(TensorArchive& ar, const std::string& prefix, Adam<float>& opt);
void restore_adam(const TensorArchive& ar, const std::string& prefix, Adam<float>& opt);

}  // namespace snowlens::nn
