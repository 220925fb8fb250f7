#include "vad/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "vad/error.hpp"

namespace vad {

std::string feature_name(Feature f) {
  switch (f) {
    case Feature::Velocity:
      return "velocity";
    case Feature::Pose:
      return "pose";
    case Feature::Deep:
      return "deep";
  }
  return "unknown";
}

Feature parse_feature(const std::string& name) {
  for (Feature f : kAllFeatures)
    if (feature_name(f) == name) return f;
  throw ValidationError("unknown feature '" + name + "' (expected velocity, pose, or deep)");
}

CalibrationParams calibrate(const std::map<Feature, std::vector<double>>& train_scores) {
  CalibrationParams params;
  for (const auto& [feature, scores] : train_scores) {
    if (scores.empty()) {
      throw ValidationError("calibrate: feature '" + feature_name(feature) + "' has no training scores");
    }
    if (!std::all_of(scores.begin(), scores.end(), [](double s) { return std::isfinite(s); })) {
      throw ValidationError("calibrate: feature '" + feature_name(feature) + "' has a non-finite training score");
    }
    const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    params.bounds[feature] = FeatureBounds{*hi, *lo};
  }
  return params;
}

FrameScore frame_score(std::span<const ObjectScores> objects, const CalibrationParams& params) {
  FrameScore out;
  for (const auto& [feature, bounds] : params.bounds) {
    const auto idx = static_cast<std::size_t>(feature);
    if (bounds.degenerate()) continue;
    std::optional<double> best;
    for (const auto& obj : objects) {
      if (!obj[idx]) continue;
      const double v = bounds.normalize(*obj[idx]);
      if (!best || v > *best) best = v;
    }
    out.terms[idx] = best.value_or(0.0);
  }
  out.total = out.terms[0] + out.terms[1] + out.terms[2];
  return out;
}

}  // namespace vad
