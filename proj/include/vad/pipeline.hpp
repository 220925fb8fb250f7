#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vad/calibration.hpp"
#include "vad/config.hpp"
#include "vad/dataset.hpp"
#include "vad/gmm.hpp"
#include "vad/kmeans.hpp"
#include "vad/knn.hpp"
#include "vad/pose.hpp"
#include "vad/scores_io.hpp"

namespace vad {

// Per-object features; a feature the object cannot provide (no flow crop, not a
// human with keypoints, no embedding) or that is disabled stays empty.
struct ObjectFeatures {
  std::optional<std::vector<double>> velocity;
  std::optional<std::vector<double>> pose;
  std::optional<std::vector<double>> deep;

  const std::optional<std::vector<double>>& get(Feature f) const;
};

struct ClipFeatures {
  std::string clip_id;
  int num_frames = 0;
  std::vector<int> frame_index;  // parallel to objects, ascending
  std::vector<ObjectFeatures> objects;
};

struct FeatureSet {
  std::vector<ClipFeatures> clips;
  int keypoint_count = 0;
  std::optional<int> embedding_dim;

  // Rows of one feature across all objects, with each row's clip.
  FeatureMatrix matrix(Feature f, std::vector<std::string>* clip_ids = nullptr) const;
};

// Mean box size of human-class training objects that carry keypoints.
PoseTargetSize pose_target_from_dataset(const Dataset& train, const PipelineConfig& config);

FeatureSet extract_features(const Dataset& dataset, const PipelineConfig& config,
                            const std::optional<PoseTargetSize>& pose_target, unsigned threads = 1);

// Density model for one kNN-scored feature: exact exemplars or k-means centroids.
struct DistanceModel {
  std::optional<ExemplarIndex> exemplars;
  std::optional<KMeansIndex> centroids;
  int k = 1;

  double score(std::span<const double> x) const;
};

struct FittedModels {
  PipelineConfig config;
  std::optional<GmmModel> velocity;
  std::optional<DistanceModel> pose;
  std::optional<DistanceModel> deep;
  std::optional<PoseTargetSize> pose_target;
  CalibrationParams calibration;
  std::map<Feature, std::size_t> feature_dims;
  int keypoint_count = 0;
  std::optional<int> embedding_dim;

  // Raw anomaly scores of one object under the enabled models.
  ObjectScores score_object(const ObjectFeatures& features) const;
};

// Fits every enabled model and calibrates on the training features. Pose and deep
// training scores exclude exemplars from the object's own clip.
FittedModels fit_models(const FeatureSet& train, const std::optional<PoseTargetSize>& pose_target,
                        const PipelineConfig& config, unsigned threads = 1);

FittedModels fit_dataset(const Dataset& train, const PipelineConfig& config, unsigned threads = 1);

struct ScoreResult {
  ClipScores raw;       // fused frame scores before smoothing
  ClipScores smoothed;  // after the temporal filter (equals raw when sigma = 0)
  std::map<std::string, std::vector<FrameScore>> frames;
};

ScoreResult score_features(const FittedModels& models, const FeatureSet& test, unsigned threads = 1);

// Checks dataset compatibility (keypoint count, embedding dimension) first.
ScoreResult score_dataset(const FittedModels& models, const Dataset& test, unsigned threads = 1);

ClipScores smooth_all(const ClipScores& raw, double sigma);

}  // namespace vad
