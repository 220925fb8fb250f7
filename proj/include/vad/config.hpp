#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "vad/calibration.hpp"
#include "vad/velocity.hpp"

namespace vad {

// Everything that determines a fit. Serialized into every artifact so the fit
// can be reproduced from the artifact alone.
struct PipelineConfig {
  std::string profile = "default";
  std::uint64_t seed = 0;
  std::set<Feature> features = {Feature::Velocity, Feature::Pose, Feature::Deep};

  int velocity_bins = 8;
  FlowSize velocity_resize{224, 224};
  bool velocity_normalize_by_height = false;

  int pose_keypoints = 17;
  int pose_human_class = 0;

  int gmm_components = 5;
  int knn_k = 1;
  std::optional<int> kmeans_k;  // set: pose/deep use nearest-centroid scoring

  double smoothing_sigma = 3.0;

  // Provenance only: the detector threshold the extractor applied.
  std::optional<double> detector_confidence_threshold = 0.8;

  bool enabled(Feature f) const { return features.count(f) > 0; }
  void validate() const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

std::vector<std::string> profile_names();

// "default": B=8, GMM n=5, kNN k=1, all features.
// "ped2-like": B=1, n=2, velocity + deep only, detector threshold 0.5.
// "shanghaitech-like": default plus magnitude normalization by box height.
PipelineConfig profile_config(const std::string& name);

// Applies nested ({"velocity": {"bins": 8}}) or dotted ({"velocity.bins": 8})
// keys on top of `base`. Unknown keys are rejected. A "profile" key resets the
// base to that profile before the remaining keys apply.
PipelineConfig apply_config_json(const nlohmann::json& j, PipelineConfig base);

nlohmann::json config_to_json(const PipelineConfig& config);

// Reads a config file. An artifact.json is accepted too; its snapshot is used.
PipelineConfig load_config_file(const std::filesystem::path& path, const PipelineConfig& base);

}  // namespace vad
