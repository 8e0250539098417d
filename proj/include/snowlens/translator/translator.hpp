#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "snowlens/core/raster.hpp"
#include "snowlens/ingest/dataset.hpp"
#include "snowlens/nn/checkpoint.hpp"
#include "snowlens/translator/network.hpp"

namespace snowlens::translator {

struct EpochRecord {
  int epoch = 0;
  std::int64_t steps = 0;  // optimizer steps completed so far
  GanLossTerms mean;       // per-step average over the epoch
};

struct TrainOptions {
  // Checkpoint trail (checkpoints/epoch_NNNN.*, starting with the
  // initialization at epoch 0), loss.csv and the final checkpoint
  // "translator_<role>.*" go here. Empty disables all files.
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> resume_from;
  std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainResult {
  TranslatorModel<float> model;
  std::vector<EpochRecord> history;
  std::int64_t steps = 0;
  std::filesystem::path final_checkpoint;  // empty when out_dir is empty
};

// Non-finite loss during training. Carries the newest checkpoint written
// before the failure (empty if none).
class TrainingDivergedError : public Error {
 public:
  TrainingDivergedError(const std::string& what, std::filesystem::path last_good)
      : Error(what), last_good_(std::move(last_good)) {}
  const std::filesystem::path& last_good_checkpoint() const { return last_good_; }

 private:
  std::filesystem::path last_good_;
};

// Resizes both sides of each pair to the configured size and trains with
// alternating discriminator / generator Adam steps. The sample order of each
// epoch derives from (seed, epoch), so resuming from a trail checkpoint
// continues the same trajectory.
TrainResult train_translator(const TranslatorConfig& cfg,
                             const std::vector<ingest::PairedSample>& pairs,
                             const TrainOptions& options = {});

std::string role_tag(Role role);

void save_translator(const std::filesystem::path& path, const TranslatorModel<float>& model,
                     nn::CheckpointManifest manifest);

struct LoadedTranslator {
  TranslatorModel<float> model;
  nn::CheckpointManifest manifest;
};

// Throws FormatError if the checkpoint is not a translator (or not of the
// expected role when given).
LoadedTranslator load_translator(const std::filesystem::path& path,
                                 std::optional<Role> expected = std::nullopt);

// Generator pass on a signed-unit image at exactly the configured size.
// Output is signed-unit with every value in [-1, 1].
RgbImage generator_forward(const TranslatorModel<float>& model, const RgbImage& x);

struct TranslateOptions {
  // Resample the generator output back to the input size; otherwise the
  // output stays at the configured size.
  bool restore_size = false;
};

struct Translation {
  RgbImage image;        // byte range
  bool resized = false;  // input was resampled to the configured size
};

// Byte image in, byte image out (K for role U, F for role T). Inputs of any
// size are resampled to the configured size first. Non-finite output (an
// untrained or corrupted model) raises ValueError.
Translation translate(const TranslatorModel<float>& model, const RgbImage& input,
                      const TranslateOptions& options = {});

std::string loss_csv(const std::vector<EpochRecord>& history);

}  // namespace snowlens::translator
