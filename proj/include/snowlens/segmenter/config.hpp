#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace snowlens::segmenter {

struct SegmenterConfig {
  std::string preset = "desk";
  int input_height = 96;
  int input_width = 96;
  int num_classes = 6;
  double width_mult = 0.35;
  int output_stride = 16;             // 8 or 16
  std::vector<int> aspp_rates = {2, 4, 6};
  int aspp_channels = 48;
  int low_level_channels = 16;
  int decoder_channels = 48;
  // Inverted-residual stages used, out of the seven of the full backbone.
  // The gradient-check micro model uses fewer.
  int backbone_stages = 7;
  // Whole-frame inference tiles the frame into grid_rows x grid_cols crops.
  int grid_rows = 2;
  int grid_cols = 4;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  int batch_size = 8;
  int epochs = 30;
  int checkpoint_every = 5;
  bool class_weighting = false;  // inverse-frequency cross-entropy weights
  std::uint64_t seed = 0;

  void validate() const;
  nlohmann::json to_json() const;
  static SegmenterConfig from_json(const nlohmann::json& j, SegmenterConfig base);
  static SegmenterConfig from_json(const nlohmann::json& j);
};

// "desk": 96x96 crops, width 0.35, reduced ASPP/decoder widths.
// "paper": 299x299 crops, width 1.0, ASPP rates (6,12,18), 256-wide heads,
// batch 16, 30 epochs, lr 1e-3.
SegmenterConfig segmenter_preset(std::string_view name);

}  // namespace snowlens::segmenter
