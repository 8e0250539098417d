#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "snowlens/core/raster.hpp"
#include "snowlens/core/taxonomy.hpp"

namespace snowlens::metrics {

// counts[g][p]: pixels with ground truth g predicted as p.
class ConfusionMatrix {
 public:
  void accumulate(const LabelMap& pred, const LabelMap& gt);
  void accumulate(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> gt);
  void merge(const ConfusionMatrix& other);

  std::uint64_t count(int gt, int pred) const { return counts_[gt][pred]; }
  std::uint64_t row(int gt) const;    // ground-truth pixels of a class
  std::uint64_t col(int pred) const;  // predicted pixels of a class
  std::uint64_t total() const;

  nlohmann::json to_json() const;
  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts_{};
};

// IoU per class; nullopt when the class is absent from both maps.
std::array<std::optional<double>, kNumClasses> per_class_iou(const ConfusionMatrix& cm);

enum class F1Average { macro, micro };

struct SegmentationReport {
  std::array<std::optional<double>, kNumClasses> per_class_iou;
  std::array<std::optional<double>, kNumClasses> per_class_accuracy;
  std::array<std::optional<double>, kNumClasses> per_class_f1;
  double mean_iou = 0;
  double mean_accuracy = 0;
  double mean_f1 = 0;
  double pixel_accuracy = 0;
  F1Average f1_average = F1Average::macro;
  std::vector<int> excluded_classes;

  nlohmann::json to_json() const;
};

// Means run over classes present in prediction or ground truth. Recall of a
// class that is only predicted counts as 0. Micro F1 pools TP/FP/FN over the
// defined classes. An empty matrix raises ValueError.
SegmentationReport summarize(const ConfusionMatrix& cm, F1Average f1 = F1Average::macro);

struct DiceValue {
  double value = 0;
  bool both_empty = false;
  bool one_empty = false;
  std::uint64_t a_count = 0;
  std::uint64_t b_count = 0;
  std::uint64_t overlap = 0;

  bool flagged() const { return both_empty || one_empty; }
};

// 2|A n B| / (|A| + |B|); both empty -> 1 (flagged), one empty -> 0 (flagged).
DiceValue dice(const PixelMask& a, const PixelMask& b);
DiceValue dice_class(const LabelMap& a, const LabelMap& b, int cls);

struct DiceEntry {
  std::string image_id;
  int cls = 0;
  DiceValue dice;
};

struct DiceReport {
  std::vector<int> roi;
  std::vector<DiceEntry> entries;  // image-major, ROI order within an image

  void add(const std::string& image_id, const LabelMap& drl, const LabelMap& dfl);
  nlohmann::json to_json() const;
  static DiceReport from_json(const nlohmann::json& j);
  std::string to_csv() const;
  // Per-class summary over the batch.
  double median(int cls) const;
  double mean(int cls) const;
};

// Empty ROI raises ValueError. Default ROI is {snow}.
DiceReport dice_report(const LabelMap& drl, const LabelMap& dfl,
                       std::vector<int> roi = {static_cast<int>(ClassId::snow)},
                       const std::string& image_id = "image");
DiceReport make_dice_report(std::vector<int> roi);

}  // namespace snowlens::metrics
