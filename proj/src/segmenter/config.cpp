#include "snowlens/segmenter/config.hpp"

#include "snowlens/core/taxonomy.hpp"
#include "snowlens/error.hpp"

namespace snowlens::segmenter {

void SegmenterConfig::validate() const {
  if (num_classes != kNumClasses) throw ValueError("segmenter num_classes must be 6");
  if (output_stride != 8 && output_stride != 16)
    throw ValueError("segmenter output_stride must be 8 or 16, got " + std::to_string(output_stride));
  if (aspp_rates.empty()) throw ValueError("segmenter needs at least one ASPP rate");
  for (int r : aspp_rates)
    if (r < 1) throw ValueError("ASPP rates must be positive, got " + std::to_string(r));
  if (input_height < 1 || input_width < 1) throw ValueError("segmenter input size must be positive");
  if (width_mult <= 0 || aspp_channels < 1 || low_level_channels < 1 || decoder_channels < 1)
    throw ValueError("segmenter widths must be positive");
  if (backbone_stages < 3 || backbone_stages > 7)
    throw ValueError("segmenter backbone_stages must lie in 3..7");
  if (grid_rows < 1 || grid_cols < 1) throw ValueError("segmenter grid must be positive");
  if (lr <= 0 || batch_size < 1 || epochs < 0 || checkpoint_every < 1)
    throw ValueError("invalid segmenter schedule settings");
}

nlohmann::json SegmenterConfig::to_json() const {
  return {{"preset", preset},
          {"input_height", input_height},
          {"input_width", input_width},
          {"num_classes", num_classes},
          {"width_mult", width_mult},
          {"output_stride", output_stride},
          {"aspp_rates", aspp_rates},
          {"aspp_channels", aspp_channels},
          {"low_level_channels", low_level_channels},
          {"decoder_channels", decoder_channels},
          {"backbone_stages", backbone_stages},
          {"grid_rows", grid_rows},
          {"grid_cols", grid_cols},
          {"lr", lr},
          {"beta1", beta1},
          {"beta2", beta2},
          {"batch_size", batch_size},
          {"epochs", epochs},
          {"checkpoint_every", checkpoint_every},
          {"class_weighting", class_weighting},
          {"seed", seed}};
}

SegmenterConfig SegmenterConfig::from_json(const nlohmann::json& j, SegmenterConfig c) {
  try {
    if (j.contains("preset")) c.preset = j["preset"].get<std::string>();
    c.input_height = j.value("input_height", c.input_height);
    c.input_width = j.value("input_width", c.input_width);
    c.num_classes = j.value("num_classes", c.num_classes);
    c.width_mult = j.value("width_mult", c.width_mult);
    c.output_stride = j.value("output_stride", c.output_stride);
    if (j.contains("aspp_rates")) c.aspp_rates = j["aspp_rates"].get<std::vector<int>>();
    c.aspp_channels = j.value("aspp_channels", c.aspp_channels);
    c.low_level_channels = j.value("low_level_channels", c.low_level_channels);
    c.decoder_channels = j.value("decoder_channels", c.decoder_channels);
    c.backbone_stages = j.value("backbone_stages", c.backbone_stages);
    c.grid_rows = j.value("grid_rows", c.grid_rows);
    c.grid_cols = j.value("grid_cols", c.grid_cols);
    c.lr = j.value("lr", c.lr);
    c.beta1 = j.value("beta1", c.beta1);
    c.beta2 = j.value("beta2", c.beta2);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.epochs = j.value("epochs", c.epochs);
    c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
    c.class_weighting = j.value("class_weighting", c.class_weighting);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ValueError(std::string("segmenter config: ") + e.what());
  }
  c.validate();
  return c;
}

SegmenterConfig SegmenterConfig::from_json(const nlohmann::json& j) {
  return from_json(j, SegmenterConfig{});
}

SegmenterConfig segmenter_preset(std::string_view name) {
  SegmenterConfig c;
  if (name == "desk") return c;
  if (name == "paper") {
    c.preset = "paper";
    c.input_height = 299;
    c.input_width = 299;
    c.width_mult = 1.0;
    c.aspp_rates = {6, 12, 18};
    c.aspp_channels = 256;
    c.low_level_channels = 48;
    c.decoder_channels = 256;
    c.batch_size = 16;
    c.epochs = 30;
    return c;
  }
  throw ValueError("unknown preset '" + std::string(name) + "' (expected desk or paper)");
}

}  // namespace snowlens::segmenter
