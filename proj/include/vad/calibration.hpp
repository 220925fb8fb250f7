#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vad {

enum class Feature { Velocity = 0, Pose = 1, Deep = 2 };
inline constexpr std::array<Feature, 3> kAllFeatures = {Feature::Velocity, Feature::Pose, Feature::Deep};

std::string feature_name(Feature f);
Feature parse_feature(const std::string& name);

// Train-set extremes of one feature's raw anomaly scores.
struct FeatureBounds {
  double max = 0;
  double min = 0;
  bool degenerate() const { return max == min; }

  // (raw − min) / (max − min), not clamped; 0 for a degenerate feature.
  double normalize(double raw) const { return degenerate() ? 0.0 : (raw - min) / (max - min); }
};

struct CalibrationParams {
  std::map<Feature, FeatureBounds> bounds;  // enabled features only
};

CalibrationParams calibrate(const std::map<Feature, std::vector<double>>& train_scores);

// Raw scores of one object; a feature the object does not carry is nullopt.
using ObjectScores = std::array<std::optional<double>, 3>;

struct FrameScore {
  std::array<double, 3> terms{};  // per-feature max over objects of the calibrated score
  double total = 0;
};

// Per feature, the maximum calibrated score over the objects carrying it (0 when
// none does or the feature is degenerate/disabled); total is the sum of terms.
FrameScore frame_score(std::span<const ObjectScores> objects, const CalibrationParams& params);

}  // namespace vad
