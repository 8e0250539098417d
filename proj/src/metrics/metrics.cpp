#include "snowlens/metrics/metrics.hpp"

#include <algorithm>
#include <cstdio>

#include "snowlens/core/mask_ops.hpp"
#include "snowlens/error.hpp"

namespace snowlens::metrics {

void ConfusionMatrix::accumulate(std::span<const std::uint8_t> pred,
                                 std::span<const std::uint8_t> gt) {
  if (pred.size() != gt.size())
    throw DimensionError("confusion matrix: prediction and ground truth differ in size");
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] >= kNumClasses || gt[i] >= kNumClasses)
      throw ValueError("confusion matrix: label outside 0..5");
    ++counts_[gt[i]][pred[i]];
  }
}

void ConfusionMatrix::accumulate(const LabelMap& pred, const LabelMap& gt) {
  require_same_dims(pred, gt, "confusion matrix");
  accumulate(pred.labels(), gt.labels());
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  for (int g = 0; g < kNumClasses; ++g)
    for (int p = 0; p < kNumClasses; ++p) counts_[g][p] += other.counts_[g][p];
}

std::uint64_t ConfusionMatrix::row(int gt) const {
  std::uint64_t s = 0;
  for (int p = 0; p < kNumClasses; ++p) s += counts_[gt][p];
  return s;
}

std::uint64_t ConfusionMatrix::col(int pred) const {
  std::uint64_t s = 0;
  for (int g = 0; g < kNumClasses; ++g) s += counts_[g][pred];
  return s;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t s = 0;
  for (int g = 0; g < kNumClasses; ++g) s += row(g);
  return s;
}

nlohmann::json ConfusionMatrix::to_json() const {
  auto rows = nlohmann::json::array();
  for (const auto& r : counts_) rows.push_back(r);
  return rows;
}

std::array<std::optional<double>, kNumClasses> per_class_iou(const ConfusionMatrix& cm) {
  std::array<std::optional<double>, kNumClasses> out{};
  for (int c = 0; c < kNumClasses; ++c) {
    const auto tp = cm.count(c, c);
    const auto denom = cm.row(c) + cm.col(c) - tp;
    if (denom > 0) out[c] = double(tp) / double(denom);
  }
  return out;
}

namespace {

nlohmann::json optional_array(const std::array<std::optional<double>, kNumClasses>& a) {
  auto arr = nlohmann::json::array();
  for (const auto& v : a) arr.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
  return arr;
}

}  // namespace

SegmentationReport summarize(const ConfusionMatrix& cm, F1Average f1) {
  if (cm.total() == 0) throw ValueError("summarize: empty confusion matrix");
  SegmentationReport r;
  r.f1_average = f1;
  r.per_class_iou = per_class_iou(cm);
  double iou_sum = 0, acc_sum = 0, f1_sum = 0, correct = 0;
  std::uint64_t tp_all = 0, fp_all = 0, fn_all = 0;
  int defined = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    const auto tp = cm.count(c, c);
    correct += double(tp);
    if (!r.per_class_iou[c]) {
      r.excluded_classes.push_back(c);
      continue;
    }
    ++defined;
    const auto row = cm.row(c);
    const auto col = cm.col(c);
    r.per_class_accuracy[c] = row > 0 ? double(tp) / double(row) : 0.0;
    r.per_class_f1[c] = 2.0 * double(tp) / double(row + col);
    iou_sum += *r.per_class_iou[c];
    acc_sum += *r.per_class_accuracy[c];
    f1_sum += *r.per_class_f1[c];
    tp_all += tp;
    fp_all += col - tp;
    fn_all += row - tp;
  }
  r.mean_iou = iou_sum / defined;
  r.mean_accuracy = acc_sum / defined;
  r.mean_f1 = f1 == F1Average::macro
                  ? f1_sum / defined
                  : 2.0 * double(tp_all) / double(2 * tp_all + fp_all + fn_all);
  r.pixel_accuracy = correct / double(cm.total());
  return r;
}

nlohmann::json SegmentationReport::to_json() const {
  return {{"per_class_iou", optional_array(per_class_iou)},
          {"per_class_accuracy", optional_array(per_class_accuracy)},
          {"per_class_f1", optional_array(per_class_f1)},
          {"mean_iou", mean_iou},
          {"mean_accuracy", mean_accuracy},
          {"mean_f1", mean_f1},
          {"f1_average", f1_average == F1Average::macro ? "macro" : "micro"},
          {"pixel_accuracy", pixel_accuracy},
          {"excluded_classes", excluded_classes}};
}

DiceValue dice(const PixelMask& a, const PixelMask& b) {
  require_same_dims(a, b, "dice");
  DiceValue d;
  d.a_count = a.popcount();
  d.b_count = b.popcount();
  d.overlap = mask_intersection(a, b).popcount();
  if (d.a_count == 0 && d.b_count == 0) {
    d.both_empty = true;
    d.value = 1.0;
  } else if (d.a_count == 0 || d.b_count == 0) {
    d.one_empty = true;
    d.value = 0.0;
  } else {
    d.value = 2.0 * double(d.overlap) / double(d.a_count + d.b_count);
  }
  return d;
}

DiceValue dice_class(const LabelMap& a, const LabelMap& b, int cls) {
  check_class_index(cls);
  require_same_dims(a, b, "dice_class");
  return dice(class_mask(a, cls), class_mask(b, cls));
}

DiceReport make_dice_report(std::vector<int> roi) {
  if (roi.empty()) throw ValueError("dice report: empty ROI class set");
  for (int c : roi) check_class_index(c);
  DiceReport r;
  r.roi = std::move(roi);
  return r;
}

void DiceReport::add(const std::string& image_id, const LabelMap& drl, const LabelMap& dfl) {
  for (int c : roi) entries.push_back({image_id, c, dice_class(drl, dfl, c)});
}

DiceReport dice_report(const LabelMap& drl, const LabelMap& dfl, std::vector<int> roi,
                       const std::string& image_id) {
  DiceReport r = make_dice_report(std::move(roi));
  r.add(image_id, drl, dfl);
  return r;
}

namespace {

std::vector<double> values_of(const DiceReport& r, int cls) {
  std::vector<double> v;
  for (const auto& e : r.entries)
    if (e.cls == cls) v.push_back(e.dice.value);
  if (v.empty()) throw ValueError("dice report has no entries for class " + std::to_string(cls));
  return v;
}

}  // namespace

double DiceReport::median(int cls) const {
  auto v = values_of(*this, cls);
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double DiceReport::mean(int cls) const {
  const auto v = values_of(*this, cls);
  double s = 0;
  for (double x : v) s += x;
  return s / double(v.size());
}

nlohmann::json DiceReport::to_json() const {
  const auto& tax = ClassTaxonomy::canonical();
  nlohmann::json j;
  auto names = nlohmann::json::array();
  for (int c : roi) names.push_back(tax.at(c).name);
  j["roi"] = names;
  auto arr = nlohmann::json::array();
  for (const auto& e : entries)
    arr.push_back({{"image", e.image_id},
                   {"class", tax.at(e.cls).name},
                   {"dice", e.dice.value},
                   {"real_pixels", e.dice.a_count},
                   {"fake_pixels", e.dice.b_count},
                   {"overlap_pixels", e.dice.overlap},
                   {"both_empty", e.dice.both_empty},
                   {"one_empty", e.dice.one_empty}});
  j["entries"] = arr;
  nlohmann::json summary;
  if (!entries.empty())
    for (int c : roi)
      summary[std::string(tax.at(c).name)] = {{"median", median(c)}, {"mean", mean(c)}};
  j["summary"] = summary;
  return j;
}

DiceReport DiceReport::from_json(const nlohmann::json& j) {
  const auto& tax = ClassTaxonomy::canonical();
  auto class_of = [&](const nlohmann::json& v) {
    auto idx = tax.index_of(v.get<std::string>());
    if (!idx) throw FormatError("unknown class in dice report: " + v.get<std::string>());
    return *idx;
  };
  try {
    std::vector<int> roi;
    for (const auto& name : j.at("roi")) roi.push_back(class_of(name));
    DiceReport r = make_dice_report(std::move(roi));
    for (const auto& e : j.at("entries")) {
      DiceEntry d;
      d.image_id = e.at("image").get<std::string>();
      d.cls = class_of(e.at("class"));
      d.dice.value = e.at("dice").get<double>();
      d.dice.a_count = e.at("real_pixels").get<std::uint64_t>();
      d.dice.b_count = e.at("fake_pixels").get<std::uint64_t>();
      d.dice.overlap = e.at("overlap_pixels").get<std::uint64_t>();
      d.dice.both_empty = e.at("both_empty").get<bool>();
      d.dice.one_empty = e.at("one_empty").get<bool>();
      r.entries.push_back(std::move(d));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed dice report: ") + e.what());
  }
}

std::string DiceReport::to_csv() const {
  const auto& tax = ClassTaxonomy::canonical();
  std::string out = "image,class,dice,real_pixels,fake_pixels,overlap_pixels,both_empty,one_empty\n";
  char buf[512];
  for (const auto& e : entries) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%.17g,%llu,%llu,%llu,%d,%d\n", e.image_id.c_str(),
                  std::string(tax.at(e.cls).name).c_str(), e.dice.value,
                  static_cast<unsigned long long>(e.dice.a_count),
                  static_cast<unsigned long long>(e.dice.b_count),
                  static_cast<unsigned long long>(e.dice.overlap), e.dice.both_empty ? 1 : 0,
                  e.dice.one_empty ? 1 : 0);
    out += buf;
  }
  return out;
}

}  // namespace snowlens::metrics
