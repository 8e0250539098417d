#include <gtest/gtest.h>

#include <cmath>

#include "snowlens/error.hpp"
#include "snowlens/metrics/metrics.hpp"
#include "test_support.hpp"

namespace snowlens::metrics {
namespace {

// Independent per-pixel counting.
struct Oracle {
  std::uint64_t tp[kNumClasses] = {}, fp[kNumClasses] = {}, fn[kNumClasses] = {};
  std::uint64_t correct = 0, total = 0;

  Oracle(const LabelMap& pred, const LabelMap& gt) {
    for (int y = 0; y < gt.height(); ++y)
      for (int x = 0; x < gt.width(); ++x) {
        const int p = pred.at(y, x), g = gt.at(y, x);
        ++total;
        if (p == g) {
          ++tp[g];
          ++correct;
        } else {
          ++fp[p];
          ++fn[g];
        }
      }
  }
  bool defined(int c) const { return tp[c] + fp[c] + fn[c] > 0; }
  double iou(int c) const { return double(tp[c]) / double(tp[c] + fp[c] + fn[c]); }
  double acc(int c) const { return tp[c] + fn[c] ? double(tp[c]) / double(tp[c] + fn[c]) : 0.0; }
  double f1(int c) const { return 2.0 * tp[c] / double(2 * tp[c] + fp[c] + fn[c]); }
};

TEST(Metrics, MatchesBruteForceOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto gt = testing::random_labels(16, 16, rng);
    const auto pred = testing::random_labels(16, 16, rng);
    ConfusionMatrix cm;
    cm.accumulate(pred, gt);
    const Oracle o(pred, gt);
    const auto r = summarize(cm);
    double miou = 0, macc = 0, mf1 = 0;
    int n = 0;
    for (int c = 0; c < kNumClasses; ++c) {
      EXPECT_EQ(cm.count(c, c), o.tp[c]);
      EXPECT_EQ(cm.col(c) - cm.count(c, c), o.fp[c]);
      EXPECT_EQ(cm.row(c) - cm.count(c, c), o.fn[c]);
      if (!o.defined(c)) {
        EXPECT_FALSE(r.per_class_iou[c].has_value());
        continue;
      }
      ++n;
      EXPECT_NEAR(*r.per_class_iou[c], o.iou(c), 1e-12);
      EXPECT_NEAR(*r.per_class_accuracy[c], o.acc(c), 1e-12);
      EXPECT_NEAR(*r.per_class_f1[c], o.f1(c), 1e-12);
      miou += o.iou(c);
      macc += o.acc(c);
      mf1 += o.f1(c);
      EXPECT_NEAR(dice_class(pred, gt, c).value, o.f1(c), 1e-12);
    }
    EXPECT_NEAR(r.mean_iou, miou / n, 1e-12);
    EXPECT_NEAR(r.mean_accuracy, macc / n, 1e-12);
    EXPECT_NEAR(r.mean_f1, mf1 / n, 1e-12);
    EXPECT_NEAR(r.pixel_accuracy, double(o.correct) / o.total, 1e-12);
  }
}

TEST(Metrics, DiceIoUIdentity) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = testing::random_labels(16, 16, rng);
    const auto b = testing::random_labels(16, 16, rng);
    ConfusionMatrix cm;
    cm.accumulate(a, b);
    const auto iou = per_class_iou(cm);
    for (int c = 0; c < kNumClasses; ++c) {
      if (!iou[c]) continue;
      EXPECT_NEAR(dice_class(a, b, c).value, 2 * *iou[c] / (1 + *iou[c]), 1e-12);
    }
  }
}

TEST(Metrics, MicroF1PoolsCounts) {
  std::mt19937_64 rng(3);
  const auto a = testing::random_labels(8, 8, rng, 3);
  const auto b = testing::random_labels(8, 8, rng, 3);
  ConfusionMatrix cm;
  cm.accumulate(a, b);
  const auto r = summarize(cm, F1Average::micro);
  const Oracle o(a, b);
  std::uint64_t tp = 0, fp = 0, fn = 0;
  for (int c = 0; c < kNumClasses; ++c) tp += o.tp[c], fp += o.fp[c], fn += o.fn[c];
  EXPECT_NEAR(r.mean_f1, 2.0 * tp / double(2 * tp + fp + fn), 1e-12);
  EXPECT_EQ(r.f1_average, F1Average::micro);
}

TEST(Metrics, PredictedOnlyClassHasZeroRecallAndEmptyMatrixThrows) {
  LabelMap gt(1, 2, std::vector<std::uint8_t>{0, 0});
  LabelMap pred(1, 2, std::vector<std::uint8_t>{0, 3});
  ConfusionMatrix cm;
  cm.accumulate(pred, gt);
  const auto r = summarize(cm);
  ASSERT_TRUE(r.per_class_accuracy[3].has_value());
  EXPECT_EQ(*r.per_class_accuracy[3], 0.0);
  EXPECT_EQ(*r.per_class_iou[3], 0.0);
  EXPECT_NEAR(*r.per_class_iou[0], 0.5, 1e-12);
  EXPECT_THROW(summarize(ConfusionMatrix{}), ValueError);
  EXPECT_THROW(cm.accumulate(LabelMap(2, 2), LabelMap(2, 3)), DimensionError);
}

TEST(Metrics, ConfusionMergeEqualsJointAccumulation) {
  std::mt19937_64 rng(4);
  const auto a1 = testing::random_labels(5, 5, rng), b1 = testing::random_labels(5, 5, rng);
  const auto a2 = testing::random_labels(5, 5, rng), b2 = testing::random_labels(5, 5, rng);
  ConfusionMatrix m1, m2, joint;
  m1.accumulate(a1, b1);
  m2.accumulate(a2, b2);
  joint.accumulate(a1, b1);
  joint.accumulate(a2, b2);
  m1.merge(m2);
  EXPECT_EQ(m1, joint);
  EXPECT_EQ(joint.total(), 50u);
}

TEST(Dice, EmptyMaskConventions) {
  const PixelMask empty(3, 3);
  PixelMask one(3, 3);
  one.set(1, 1, true);
  const auto both = dice(empty, empty);
  EXPECT_EQ(both.value, 1.0);
  EXPECT_TRUE(both.both_empty);
  EXPECT_TRUE(both.flagged());
  const auto half = dice(one, empty);
  EXPECT_EQ(half.value, 0.0);
  EXPECT_TRUE(half.one_empty);
  EXPECT_EQ(dice(one, one).value, 1.0);
  EXPECT_FALSE(dice(one, one).flagged());
  EXPECT_THROW(dice(one, PixelMask(3, 4)), DimensionError);
}

TEST(DiceReport, DefaultRoiIsSnowAndSerializes) {
  std::mt19937_64 rng(5);
  auto report = make_dice_report({static_cast<int>(ClassId::snow), static_cast<int>(ClassId::road)});
  for (int i = 0; i < 5; ++i)
    report.add("img" + std::to_string(i), testing::random_labels(8, 8, rng), testing::random_labels(8, 8, rng));
  EXPECT_EQ(report.entries.size(), 10u);
  const auto csv = report.to_csv();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 11);
  const auto back = DiceReport::from_json(report.to_json());
  ASSERT_EQ(back.entries.size(), report.entries.size());
  for (std::size_t i = 0; i < back.entries.size(); ++i) {
    EXPECT_EQ(back.entries[i].dice.value, report.entries[i].dice.value);
    EXPECT_EQ(back.entries[i].cls, report.entries[i].cls);
  }
  std::vector<double> snow;
  for (const auto& e : report.entries)
    if (e.cls == 3) snow.push_back(e.dice.value);
  std::sort(snow.begin(), snow.end());
  EXPECT_DOUBLE_EQ(report.median(3), snow[2]);

  const auto single = dice_report(testing::random_labels(4, 4, rng), testing::random_labels(4, 4, rng));
  ASSERT_EQ(single.roi, std::vector<int>({3}));
  EXPECT_THROW(make_dice_report({}), ValueError);
}

}  // namespace
}  // namespace snowlens::metrics
