#pragma once

namespace snowlens::reference {

// Figures reported for the full-scale camera corpus (1,130 translator pairs,
// 500 annotated frames). Kept for documentation; the synthetic desk runs are
// not expected to reproduce them.
inline constexpr double kMeanIoU = 0.7718;
inline constexpr double kMeanAccuracy = 0.8572;
inline constexpr double kMeanF1 = 0.6886;
inline constexpr double kRoadSnowIoUFloor = 0.8;
inline constexpr double kDiceLow = 0.75;
inline constexpr double kDiceHigh = 0.95;
inline constexpr double kTranslatorTrainingHours = 66.0;
inline constexpr double kSegmenterTrainingHours = 3.5;

}  // namespace snowlens::reference
