#include "vad/pipeline.hpp"

#include <set>

#include "vad/error.hpp"
#include "vad/parallel.hpp"
#include "vad/rng.hpp"
#include "vad/smoothing.hpp"
#include "vad/velocity.hpp"

namespace vad {
namespace {

struct ObjectRef {
  std::size_t clip;
  std::size_t object;
};

std::string missing_feature_message(Feature f) {
  switch (f) {
    case Feature::Velocity:
      return "feature 'velocity' enabled but dataset has no flow crops";
    case Feature::Pose:
      return "feature 'pose' enabled but dataset has no keypoints on human-class objects";
    case Feature::Deep:
      return "feature 'deep' enabled but dataset has no embeddings";
  }
  return "feature enabled but missing";
}

// Leave-own-clip-out training scores for a distance-scored feature.
std::vector<double> held_out_scores(const FeatureMatrix& rows, const std::vector<std::string>& clips,
                                    const DistanceModel& model, Feature feature, const PipelineConfig& config,
                                    unsigned threads) {
  const std::set<std::string> distinct(clips.begin(), clips.end());
  if (distinct.size() < 2) {
    throw ValidationError("feature '" + feature_name(feature) +
                          "': calibration excludes each object's own clip, so at least two training clips are needed");
  }
  std::vector<double> scores(rows.rows());
  if (model.exemplars) {
    parallel_for(rows.rows(), threads, [&](std::size_t i) {
      scores[i] = knn_score(*model.exemplars, rows.row(i), model.k, clips[i]);
    });
    return scores;
  }
  // Compressed mode: centroids fitted without the held-out clip.
  for (const auto& held_out : distinct) {
    FeatureMatrix others;
    std::vector<std::size_t> own;
    for (std::size_t i = 0; i < rows.rows(); ++i) {
      if (clips[i] == held_out) {
        own.push_back(i);
      } else {
        others.push_row(rows.row(i));
      }
    }
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(*config.kmeans_k), others.rows());
    const auto seed = derive_seed(derive_seed(config.seed, "kmeans." + feature_name(feature)), "fold." + held_out);
    const KMeansIndex fold = fit_kmeans(others, k, seed).index;
    parallel_for(own.size(), threads, [&](std::size_t j) { scores[own[j]] = kmeans_score(fold, rows.row(own[j])); });
  }
  return scores;
}

}  // namespace

const std::optional<std::vector<double>>& ObjectFeatures::get(Feature f) const {
  switch (f) {
    case Feature::Velocity:
      return velocity;
    case Feature::Pose:
      return pose;
    case Feature::Deep:
      return deep;
  }
  return velocity;
}

FeatureMatrix FeatureSet::matrix(Feature f, std::vector<std::string>* clip_ids) const {
  FeatureMatrix m;
  for (const auto& clip : clips) {
    for (const auto& obj : clip.objects) {
      const auto& v = obj.get(f);
      if (!v) continue;
      m.push_row(*v);
      if (clip_ids) clip_ids->push_back(clip.clip_id);
    }
  }
  return m;
}

PoseTargetSize pose_target_from_dataset(const Dataset& train, const PipelineConfig& config) {
  std::vector<BoundingBox> boxes;
  for (const auto& clip : train.clips)
    for (const auto& o : clip.objects)
      if (o.class_label == config.pose_human_class) boxes.push_back(o.bbox);
  return compute_pose_target_size(boxes);
}

FeatureSet extract_features(const Dataset& dataset, const PipelineConfig& config,
                            const std::optional<PoseTargetSize>& pose_target, unsigned threads) {
  if (config.enabled(Feature::Pose) && !pose_target) {
    throw std::invalid_argument("extract_features: pose enabled without a pose target size");
  }
  FeatureSet out;
  out.keypoint_count = dataset.manifest.keypoint_count;
  out.embedding_dim = dataset.manifest.embedding_dim;
  std::vector<ObjectRef> refs;
  for (std::size_t c = 0; c < dataset.clips.size(); ++c) {
    const auto& clip = dataset.clips[c];
    ClipFeatures cf;
    cf.clip_id = clip.manifest.clip_id;
    cf.num_frames = clip.manifest.num_frames;
    cf.objects.resize(clip.objects.size());
    for (std::size_t i = 0; i < clip.objects.size(); ++i) {
      cf.frame_index.push_back(clip.objects[i].frame_index);
      refs.push_back({c, i});
    }
    out.clips.push_back(std::move(cf));
  }

  parallel_for(refs.size(), threads, [&](std::size_t n) {
    const auto [c, i] = refs[n];
    const ObjectRecord& o = dataset.clips[c].objects[i];
    ObjectFeatures& f = out.clips[c].objects[i];
    if (config.enabled(Feature::Velocity) && o.flow) {
      const FlowCrop resized = resize_flow_crop(*o.flow, config.velocity_resize);
      const auto height = config.velocity_normalize_by_height ? std::optional<double>(o.bbox.height()) : std::nullopt;
      f.velocity = velocity_histogram(resized, config.velocity_bins, height);
    }
    if (config.enabled(Feature::Pose) && o.keypoints && o.class_label == config.pose_human_class) {
      f.pose = normalize_keypoints(*o.keypoints, o.bbox, *pose_target);
    }
    if (config.enabled(Feature::Deep) && o.embedding) f.deep = *o.embedding;
  });
  return out;
}

double DistanceModel::score(std::span<const double> x) const {
  if (exemplars) return knn_score(*exemplars, x, k);
  return kmeans_score(*centroids, x);
}

ObjectScores FittedModels::score_object(const ObjectFeatures& f) const {
  ObjectScores s;
  if (velocity && f.velocity) s[0] = gmm_score(*velocity, *f.velocity);
  if (pose && f.pose) s[1] = pose->score(*f.pose);
  if (deep && f.deep) s[2] = deep->score(*f.deep);
  return s;
}

FittedModels fit_models(const FeatureSet& train, const std::optional<PoseTargetSize>& pose_target,
                        const PipelineConfig& config, unsigned threads) {
  config.validate();
  FittedModels m;
  m.config = config;
  m.keypoint_count = train.keypoint_count;
  m.embedding_dim = train.embedding_dim;
  if (config.enabled(Feature::Pose)) {
    if (train.keypoint_count != config.pose_keypoints) {
      throw CompatibilityError("config pose.keypoints is " + std::to_string(config.pose_keypoints) +
                               " but the dataset declares " + std::to_string(train.keypoint_count));
    }
    m.pose_target = pose_target;
  }

  std::map<Feature, std::vector<double>> train_scores;
  for (Feature f : config.features) {
    std::vector<std::string> clips;
    const FeatureMatrix rows = train.matrix(f, &clips);
    if (rows.empty()) throw ValidationError(missing_feature_message(f));
    m.feature_dims[f] = rows.cols();
    std::vector<double> scores(rows.rows());

    if (f == Feature::Velocity) {
      m.velocity = fit_gmm(rows, config.gmm_components, derive_seed(config.seed, "gmm.velocity")).model;
      parallel_for(rows.rows(), threads, [&](std::size_t i) { scores[i] = gmm_score(*m.velocity, rows.row(i)); });
    } else {
      DistanceModel dm;
      dm.k = config.knn_k;
      if (config.kmeans_k) {
        if (static_cast<std::size_t>(*config.kmeans_k) > rows.rows()) {
          throw ValidationError("kmeans.k = " + std::to_string(*config.kmeans_k) + " exceeds the " +
                                std::to_string(rows.rows()) + " training rows of feature '" + feature_name(f) + "'");
        }
        dm.centroids = fit_kmeans(rows, static_cast<std::size_t>(*config.kmeans_k),
                                  derive_seed(config.seed, "kmeans." + feature_name(f)))
                           .index;
      } else {
        dm.exemplars = ExemplarIndex(rows, clips);
      }
      scores = held_out_scores(rows, clips, dm, f, config, threads);
      (f == Feature::Pose ? m.pose : m.deep) = std::move(dm);
    }
    train_scores[f] = std::move(scores);
  }
  m.calibration = calibrate(train_scores);
  return m;
}

FittedModels fit_dataset(const Dataset& train, const PipelineConfig& config, unsigned threads) {
  config.validate();
  if (train.manifest.split != Split::Train) throw ValidationError("fit requires the train split");
  std::optional<PoseTargetSize> target;
  if (config.enabled(Feature::Pose)) {
    if (!train.has_keypoints()) throw ValidationError(missing_feature_message(Feature::Pose));
    target = pose_target_from_dataset(train, config);
  }
  const FeatureSet features = extract_features(train, config, target, threads);
  return fit_models(features, target, config, threads);
}

ClipScores smooth_all(const ClipScores& raw, double sigma) {
  if (sigma <= 0.0) return raw;
  ClipScores out;
  for (const auto& [clip, values] : raw) out.emplace(clip, values.empty() ? values : smooth_scores(values, sigma));
  return out;
}

ScoreResult score_features(const FittedModels& models, const FeatureSet& test, unsigned threads) {
  for (const auto& [feature, dim] : models.feature_dims) {
    for (const auto& clip : test.clips) {
      for (const auto& obj : clip.objects) {
        const auto& v = obj.get(feature);
        if (v && v->size() != dim) {
          throw CompatibilityError("feature '" + feature_name(feature) + "': artifact dimension " +
                                   std::to_string(dim) + ", dataset dimension " + std::to_string(v->size()));
        }
      }
    }
  }
  std::vector<ObjectRef> refs;
  for (std::size_t c = 0; c < test.clips.size(); ++c)
    for (std::size_t i = 0; i < test.clips[c].objects.size(); ++i) refs.push_back({c, i});
  std::vector<ObjectScores> object_scores(refs.size());
  parallel_for(refs.size(), threads, [&](std::size_t n) {
    object_scores[n] = models.score_object(test.clips[refs[n].clip].objects[refs[n].object]);
  });

  ScoreResult result;
  std::size_t n = 0;
  for (const auto& clip : test.clips) {
    std::vector<FrameScore> frames(static_cast<std::size_t>(clip.num_frames));
    std::vector<double> totals(frames.size(), 0.0);
    std::size_t i = 0;
    for (int frame = 0; frame < clip.num_frames; ++frame) {
      const std::size_t begin = i;
      while (i < clip.objects.size() && clip.frame_index[i] == frame) ++i;
      const std::span<const ObjectScores> objs(object_scores.data() + n + begin, i - begin);
      frames[static_cast<std::size_t>(frame)] = frame_score(objs, models.calibration);
      totals[static_cast<std::size_t>(frame)] = frames[static_cast<std::size_t>(frame)].total;
    }
    n += clip.objects.size();
    result.raw.emplace(clip.clip_id, std::move(totals));
    result.frames.emplace(clip.clip_id, std::move(frames));
  }
  result.smoothed = smooth_all(result.raw, models.config.smoothing_sigma);
  return result;
}

ScoreResult score_dataset(const FittedModels& models, const Dataset& test, unsigned threads) {
  const auto& cfg = models.config;
  if (cfg.enabled(Feature::Pose) && test.manifest.keypoint_count != models.keypoint_count) {
    throw CompatibilityError("keypoint count: artifact " + std::to_string(models.keypoint_count) + ", dataset " +
                             std::to_string(test.manifest.keypoint_count));
  }
  if (cfg.enabled(Feature::Deep) && test.manifest.embedding_dim != models.embedding_dim) {
    auto show = [](const std::optional<int>& d) { return d ? std::to_string(*d) : std::string("none"); };
    throw CompatibilityError("embedding dimension: artifact " + show(models.embedding_dim) + ", dataset " +
                             show(test.manifest.embedding_dim));
  }
  const FeatureSet features = extract_features(test, cfg, models.pose_target, threads);
  return score_features(models, features, threads);
}

}  // namespace vad
