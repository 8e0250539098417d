#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "snowlens/core/raster.hpp"
#include "snowlens/core/taxonomy.hpp"
#include "snowlens/ingest/dataset.hpp"
#include "snowlens/nn/checkpoint.hpp"
#include "snowlens/segmenter/network.hpp"

namespace snowlens::segmenter {

using SegmenterModel = DeepLabV3Plus<float>;

// H x W x 6 per-pixel class probabilities, interleaved.
struct ClassScores {
  int height = 0;
  int width = 0;
  std::vector<float> probs;

  float at(int y, int x, int c) const {
    return probs[(static_cast<std::size_t>(y) * width + x) * kNumClasses + c];
  }
};

// Image dims must equal the configured input size. Byte or signed-unit input.
ClassScores segment_scores(const SegmenterModel& model, const RgbImage& image);
// Per-pixel argmax; ties go to the lowest class index.
LabelMap argmax_labels(const ClassScores& scores);
LabelMap segment(const SegmenterModel& model, const RgbImage& image);

// Whole-frame labels of any size: the frame is resampled to
// grid_rows*H x grid_cols*W, tiled into input-sized crops, each crop is
// segmented, and the stitched labels are resampled (nearest) back.
LabelMap segment_frame(const SegmenterModel& model, const RgbImage& frame);

// Resamples each annotated frame (bilinear image, nearest labels) to the
// crop grid and cuts it into input-sized crops; ids get a "_rRcC" suffix.
std::vector<ingest::AnnotatedSample> prepare_crops(const std::vector<ingest::AnnotatedSample>& frames,
                                                   const SegmenterConfig& cfg);

struct SegEpochRecord {
  int epoch = 0;
  double loss = 0;            // mean per-batch cross-entropy
  double pixel_accuracy = 0;  // training-mode predictions over the epoch
  double miou = 0;
};

struct SegTrainOptions {
  // Trail checkpoints/epoch_NNNN.* (epoch 0 = initialization), train_metrics.csv
  // and the final "segmenter.*" checkpoint. Empty disables files.
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> resume_from;
  // Initializes matching backbone parameters from another segmenter checkpoint.
  std::optional<std::filesystem::path> backbone_init;
  // Re-estimates batch-norm statistics over the training set after the last
  // epoch (cumulative average of batch statistics).
  bool recalibrate_bn = true;
  std::function<void(const SegEpochRecord&)> on_epoch;
};

struct SegTrainResult {
  SegmenterModel model;
  std::vector<SegEpochRecord> history;
  std::filesystem::path final_checkpoint;
};

// Crops must all be at the configured input size. Empty input raises
// ValueError; a non-finite loss raises translator-style divergence carrying
// the last trail checkpoint.
SegTrainResult train_segmenter(const SegmenterConfig& cfg,
                               const std::vector<ingest::AnnotatedSample>& crops,
                               const SegTrainOptions& options = {});

class SegmenterDivergedError : public Error {
 public:
  SegmenterDivergedError(const std::string& what, std::filesystem::path last_good)
      : Error(what), last_good_(std::move(last_good)) {}
  const std::filesystem::path& last_good_checkpoint() const { return last_good_; }

 private:
  std::filesystem::path last_good_;
};

inline constexpr const char* kSegmenterRoleTag = "segmenter-S";

void save_segmenter(const std::filesystem::path& path, const SegmenterModel& model,
                    nn::CheckpointManifest manifest);

struct LoadedSegmenter {
  SegmenterModel model;
  nn::CheckpointManifest manifest;
};

LoadedSegmenter load_segmenter(const std::filesystem::path& path);

std::string train_metrics_csv(const std::vector<SegEpochRecord>& history);

}  // namespace snowlens::segmenter
