#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "vad/dataset.hpp"

namespace vad {

enum class AnomalyType { Speed, Direction, Pose, Embedding };

std::string anomaly_type_name(AnomalyType t);
AnomalyType parse_anomaly_type(const std::string& name);

// Synthetic scenes of walking people. Every track keeps a preferred direction and
// speed; anomalies are contiguous frame runs in test clips where the first track
// (the "actor") moves faster, moves the opposite way, has distorted limbs, or
// has an embedding shifted off the normal cluster.
struct SynthConfig {
  std::uint64_t seed = 7;
  int train_clips = 5;
  int test_clips = 5;
  int frames_per_clip = 200;
  int objects_per_frame = 3;
  int non_human_tracks = 0;  // the last N tracks are class 2 without keypoints

  double frame_width = 640;
  double frame_height = 360;
  double box_height_mean = 80;
  double box_height_std = 8;
  double box_aspect = 0.4;  // width / height

  int crop_height = 16;
  int crop_width = 8;
  double speed_mean = 2.0;  // pixels/frame
  double speed_std = 0.25;
  double speed_jitter = 0.05;  // per-frame relative speed noise
  double direction_mean = 0.0;  // radians
  double direction_std = 0.15;
  double flow_noise = 0.05;

  int keypoint_count = 17;
  double keypoint_noise = 0.01;  // in box heights
  int embedding_dim = 16;  // 0 disables embeddings
  double embedding_std = 1.0;

  double anomaly_fraction = 0.2;
  int anomaly_run_length = 20;
  std::vector<AnomalyType> anomaly_types = {AnomalyType::Speed, AnomalyType::Pose};
  double speed_multiplier = 5.0;
  double pose_distortion = 0.5;  // in box heights
  double embedding_shift = 8.0;

  int human_class = 0;
  double confidence = 0.9;

  void validate() const;
};

SynthConfig synth_config_from_json(const nlohmann::json& j, SynthConfig base = {});
nlohmann::json synth_config_to_json(const SynthConfig& config);

struct SynthSummary {
  std::size_t train_objects = 0;
  std::size_t test_objects = 0;
  std::size_t anomalous_frames = 0;
  std::size_t test_frames = 0;
};

// Writes <root>/train and <root>/test (with labels). Deterministic under seed.
SynthSummary generate_synthetic(const SynthConfig& config, const std::filesystem::path& root);

}  // namespace vad
