#include "vad/synthetic.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>

#include "vad/error.hpp"
#include "vad/rng.hpp"

namespace vad {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

// COCO-17 standing pose, box-relative (u right, v down).
constexpr std::array<std::array<double, 2>, 17> kSkeleton = {{
    {0.50, 0.08}, {0.54, 0.06}, {0.46, 0.06}, {0.58, 0.07}, {0.42, 0.07},  // head
    {0.68, 0.20}, {0.32, 0.20},                                            // shoulders
    {0.75, 0.37}, {0.25, 0.37}, {0.78, 0.52}, {0.22, 0.52},                // elbows, wrists
    {0.60, 0.52}, {0.40, 0.52},                                            // hips
    {0.62, 0.73}, {0.38, 0.73}, {0.63, 0.95}, {0.37, 0.95},                // knees, ankles
}};

// Horizontal swing amplitude per keypoint over the gait cycle.
constexpr std::array<double, 17> kSwing = {0, 0, 0, 0, 0, 0, 0, -0.04, 0.04, -0.08, 0.08, 0, 0, 0.06, -0.06, 0.12, -0.12};

constexpr bool is_limb(std::size_t k) { return (k >= 7 && k <= 10) || k >= 13; }

constexpr double kGaitPeriod = 24.0;  // frames

double normal(std::mt19937_64& rng, double mean, double sd) {
  // Box–Muller on uniform01 keeps draws identical across standard libraries.
  double u1 = 0.0;
  do {
    u1 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  } while (u1 <= 0.0);
  const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Track {
  double x0, y0;
  double box_h, box_w;
  double speed, direction;
  double gait_phase;
  bool human;
};

Track make_track(const SynthConfig& c, std::uint64_t seed, int index) {
  std::mt19937_64 rng(seed);
  Track t{};
  t.box_h = std::max(0.25 * c.box_height_mean, normal(rng, c.box_height_mean, c.box_height_std));
  t.box_w = t.box_h * c.box_aspect;
  t.x0 = uniform(rng, 0.0, c.frame_width);
  t.y0 = uniform(rng, 0.0, std::max(1.0, c.frame_height - t.box_h));
  t.speed = std::max(0.1 * c.speed_mean, normal(rng, c.speed_mean, c.speed_std));
  t.direction = normal(rng, c.direction_mean, c.direction_std);
  t.gait_phase = uniform(rng, 0.0, 2.0 * kPi);
  t.human = index < c.objects_per_frame - c.non_human_tracks;
  return t;
}

double wrap(double v, double period) {
  double r = std::fmod(v, period);
  return r < 0 ? r + period : r;
}

// Anomalous frame runs for one test clip: `fraction` of frames split into runs
// of about run_length, one run per equal segment at a random offset.
using AnomalyPlan = std::vector<std::optional<AnomalyType>>;

AnomalyPlan plan_anomalies(const SynthConfig& c, std::uint64_t seed, int clip_index) {
  AnomalyPlan plan(static_cast<std::size_t>(c.frames_per_clip));
  const int target = static_cast<int>(std::lround(c.anomaly_fraction * c.frames_per_clip));
  if (target == 0 || c.anomaly_types.empty()) return plan;
  std::mt19937_64 rng(seed);
  const int runs = std::max(1, static_cast<int>(std::lround(double(target) / c.anomaly_run_length)));
  const int segment = c.frames_per_clip / runs;
  for (int r = 0; r < runs; ++r) {
    const int len = target / runs + (r < target % runs ? 1 : 0);
    const int room = std::max(0, segment - len);
    const int start = r * segment + std::min(room, static_cast<int>(uniform(rng, 0.0, room + 1.0)));
    const auto type = c.anomaly_types[static_cast<std::size_t>(clip_index + r) % c.anomaly_types.size()];
    for (int f = start; f < std::min(start + len, c.frames_per_clip); ++f) plan[static_cast<std::size_t>(f)] = type;
  }
  return plan;
}

std::string clip_name(Split split, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%03d", to_string(split).c_str(), index);
  return buf;
}

void generate_split(const SynthConfig& c, const fs::path& root, Split split, SynthSummary& summary) {
  const int clip_count = split == Split::Train ? c.train_clips : c.test_clips;
  const std::uint64_t split_tag = split == Split::Train ? 1 : 2;
  DatasetManifest manifest;
  manifest.split = split;
  manifest.keypoint_count = c.keypoint_count;
  if (c.embedding_dim > 0) manifest.embedding_dim = c.embedding_dim;

  std::mt19937_64 dir_rng(derive_seed(c.seed, "embedding.anomaly_direction"));
  std::vector<double> shift_dir(static_cast<std::size_t>(std::max(0, c.embedding_dim)));
  double norm = 0.0;
  for (double& v : shift_dir) {
    v = normal(dir_rng, 0.0, 1.0);
    norm += v * v;
  }
  for (double& v : shift_dir) v /= std::sqrt(std::max(norm, 1e-300));

  for (int ci = 0; ci < clip_count; ++ci) {
    ClipManifest clip{clip_name(split, ci), c.frames_per_clip, clip_name(split, ci) + "/objects.jsonl"};
    AnomalyPlan plan(static_cast<std::size_t>(c.frames_per_clip));
    if (split == Split::Test) plan = plan_anomalies(c, derive_seed(c.seed, {split_tag, std::uint64_t(ci), 0xA11}), ci);

    std::vector<Track> tracks;
    for (int t = 0; t < c.objects_per_frame; ++t) {
      tracks.push_back(make_track(c, derive_seed(c.seed, {split_tag, std::uint64_t(ci), std::uint64_t(t)}), t));
    }

    std::vector<ObjectRecord> objects;
    std::vector<int> labels(static_cast<std::size_t>(c.frames_per_clip), 0);
    for (int f = 0; f < c.frames_per_clip; ++f) {
      const auto& anomaly = plan[static_cast<std::size_t>(f)];
      const bool anomalous_frame = anomaly.has_value();
      if (anomalous_frame) labels[static_cast<std::size_t>(f)] = 1;
      for (int t = 0; t < c.objects_per_frame; ++t) {
        const Track& tr = tracks[static_cast<std::size_t>(t)];
        std::mt19937_64 rng(derive_seed(c.seed, {split_tag, std::uint64_t(ci), std::uint64_t(t), std::uint64_t(f), 7}));
        const bool actor = anomalous_frame && t == 0;
        const std::optional<AnomalyType> type = actor ? anomaly : std::nullopt;

        const double speed = tr.speed * (1.0 + normal(rng, 0.0, c.speed_jitter));
        const double vx = speed * std::cos(tr.direction);
        const double vy = speed * std::sin(tr.direction);
        const double x_min = wrap(tr.x0 + tr.speed * std::cos(tr.direction) * f, c.frame_width);
        const double y_min = wrap(tr.y0 + tr.speed * std::sin(tr.direction) * f, std::max(1.0, c.frame_height - tr.box_h));

        ObjectRecord r;
        r.clip_id = clip.clip_id;
        r.frame_index = f;
        r.bbox = {x_min, y_min, x_min + tr.box_w, y_min + tr.box_h};
        r.class_label = tr.human ? c.human_class : 2;
        r.confidence = c.confidence;

        double fx = vx, fy = vy;
        if (type == AnomalyType::Speed) {
          fx *= c.speed_multiplier;
          fy *= c.speed_multiplier;
        } else if (type == AnomalyType::Direction) {
          fx = -fx;
          fy = -fy;
        }
        FlowCrop crop{c.crop_height, c.crop_width, {}};
        crop.data.resize(2 * static_cast<std::size_t>(c.crop_height) * c.crop_width);
        for (std::size_t i = 0; i < crop.data.size(); i += 2) {
          const double nx = c.flow_noise > 0 ? normal(rng, 0.0, c.flow_noise) : 0.0;
          const double ny = c.flow_noise > 0 ? normal(rng, 0.0, c.flow_noise) : 0.0;
          crop.data[i] = static_cast<float>(fx + nx);
          crop.data[i + 1] = static_cast<float>(fy + ny);
        }
        char name[64];
        std::snprintf(name, sizeof(name), "/flow/%06d_%02d.vadt", f, t);
        r.flow_ref = TensorRef{clip.clip_id + name, DType::Float32,
                               {std::uint32_t(c.crop_height), std::uint32_t(c.crop_width), 2}};
        r.flow = std::move(crop);

        if (tr.human && c.keypoint_count > 0) {
          const double phase = tr.gait_phase + 2.0 * kPi * f / kGaitPeriod;
          const double swing = std::sin(phase);
          std::vector<Keypoint> kps;
          for (int k = 0; k < c.keypoint_count; ++k) {
            const auto idx = static_cast<std::size_t>(k) % kSkeleton.size();
            double u = kSkeleton[idx][0] + kSwing[idx] * swing;
            double v = kSkeleton[idx][1];
            u += normal(rng, 0.0, c.keypoint_noise) / c.box_aspect;
            v += normal(rng, 0.0, c.keypoint_noise);
            const double a = uniform(rng, 0.0, 2.0 * kPi);
            if (type == AnomalyType::Pose && is_limb(idx)) {
              u += c.pose_distortion * std::cos(a) / c.box_aspect;
              v += c.pose_distortion * std::sin(a);
            }
            kps.push_back({r.bbox.x_min + u * tr.box_w, r.bbox.y_min + v * tr.box_h});
          }
          r.keypoints = std::move(kps);
        }

        if (c.embedding_dim > 0) {
          std::vector<double> emb(static_cast<std::size_t>(c.embedding_dim));
          for (auto& e : emb) e = normal(rng, 0.0, c.embedding_std);
          if (type == AnomalyType::Embedding) {
            for (std::size_t i = 0; i < emb.size(); ++i) emb[i] += c.embedding_shift * shift_dir[i];
          }
          r.embedding = std::move(emb);
        }
        objects.push_back(std::move(r));
      }
    }
    write_clip_objects(root, split, clip, objects);
    if (split == Split::Test) {
      write_labels(root, clip.clip_id, labels);
      summary.test_objects += objects.size();
      summary.test_frames += labels.size();
      for (int l : labels) summary.anomalous_frames += static_cast<std::size_t>(l);
    } else {
      summary.train_objects += objects.size();
    }
    manifest.clips.push_back(std::move(clip));
  }
  write_manifest(root, manifest);
}

}  // namespace

std::string anomaly_type_name(AnomalyType t) {
  switch (t) {
    case AnomalyType::Speed:
      return "speed";
    case AnomalyType::Direction:
      return "direction";
    case AnomalyType::Pose:
      return "pose";
    case AnomalyType::Embedding:
      return "embedding";
  }
  return "unknown";
}

AnomalyType parse_anomaly_type(const std::string& name) {
  for (auto t : {AnomalyType::Speed, AnomalyType::Direction, AnomalyType::Pose, AnomalyType::Embedding})
    if (anomaly_type_name(t) == name) return t;
  throw ValidationError("unknown anomaly type '" + name + "'");
}

void SynthConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ValidationError("synthetic config: " + what);
  };
  require(train_clips >= 1 && test_clips >= 1, "need at least one train and one test clip");
  require(frames_per_clip >= 1, "frames_per_clip must be >= 1");
  require(objects_per_frame >= 0, "objects_per_frame must be >= 0");
  require(non_human_tracks >= 0 && non_human_tracks <= objects_per_frame, "non_human_tracks out of range");
  require(frame_width > 0 && frame_height > 0, "frame size must be positive");
  require(box_height_mean > 0 && box_height_std >= 0 && box_aspect > 0, "box size parameters must be positive");
  require(crop_height >= 1 && crop_width >= 1, "crop size must be >= 1");
  require(speed_mean > 0 && speed_std >= 0 && speed_jitter >= 0, "speed parameters must be positive");
  require(direction_std >= 0 && flow_noise >= 0 && keypoint_noise >= 0, "noise levels must be >= 0");
  require(keypoint_count >= 1, "keypoint_count must be >= 1");
  require(embedding_dim >= 0 && embedding_std >= 0, "embedding parameters must be >= 0");
  require(anomaly_fraction >= 0 && anomaly_fraction <= 1, "anomaly_fraction must be in [0, 1]");
  require(anomaly_run_length >= 1, "anomaly_run_length must be >= 1");
  require(speed_multiplier > 0, "speed_multiplier must be > 0");
  require(pose_distortion >= 0 && embedding_shift >= 0, "distortion magnitudes must be >= 0");
  require(confidence >= 0 && confidence <= 1, "confidence must be in [0, 1]");
}

SynthConfig synth_config_from_json(const json& j, SynthConfig c) {
  if (!j.is_object()) throw ValidationError("synthetic config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "train_clips") c.train_clips = v.get<int>();
      else if (key == "test_clips") c.test_clips = v.get<int>();
      else if (key == "frames_per_clip") c.frames_per_clip = v.get<int>();
      else if (key == "objects_per_frame") c.objects_per_frame = v.get<int>();
      else if (key == "non_human_tracks") c.non_human_tracks = v.get<int>();
      else if (key == "frame_width") c.frame_width = v.get<double>();
      else if (key == "frame_height") c.frame_height = v.get<double>();
      else if (key == "box_height_mean") c.box_height_mean = v.get<double>();
      else if (key == "box_height_std") c.box_height_std = v.get<double>();
      else if (key == "box_aspect") c.box_aspect = v.get<double>();
      else if (key == "crop_height") c.crop_height = v.get<int>();
      else if (key == "crop_width") c.crop_width = v.get<int>();
      else if (key == "speed_mean") c.speed_mean = v.get<double>();
      else if (key == "speed_std") c.speed_std = v.get<double>();
      else if (key == "speed_jitter") c.speed_jitter = v.get<double>();
      else if (key == "direction_mean") c.direction_mean = v.get<double>();
      else if (key == "direction_std") c.direction_std = v.get<double>();
      else if (key == "flow_noise") c.flow_noise = v.get<double>();
      else if (key == "keypoint_count") c.keypoint_count = v.get<int>();
      else if (key == "keypoint_noise") c.keypoint_noise = v.get<double>();
      else if (key == "embedding_dim") c.embedding_dim = v.get<int>();
      else if (key == "embedding_std") c.embedding_std = v.get<double>();
      else if (key == "anomaly_fraction") c.anomaly_fraction = v.get<double>();
      else if (key == "anomaly_run_length") c.anomaly_run_length = v.get<int>();
      else if (key == "anomaly_types") {
        c.anomaly_types.clear();
        for (const auto& t : v) c.anomaly_types.push_back(parse_anomaly_type(t.get<std::string>()));
      } else if (key == "speed_multiplier") c.speed_multiplier = v.get<double>();
      else if (key == "pose_distortion") c.pose_distortion = v.get<double>();
      else if (key == "embedding_shift") c.embedding_shift = v.get<double>();
      else if (key == "human_class") c.human_class = v.get<int>();
      else if (key == "confidence") c.confidence = v.get<double>();
      else throw ValidationError("synthetic config: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("synthetic config: ") + e.what());
  }
  c.validate();
  return c;
}

json synth_config_to_json(const SynthConfig& c) {
  json types = json::array();
  for (auto t : c.anomaly_types) types.push_back(anomaly_type_name(t));
  return {{"seed", c.seed},
          {"train_clips", c.train_clips},
          {"test_clips", c.test_clips},
          {"frames_per_clip", c.frames_per_clip},
          {"objects_per_frame", c.objects_per_frame},
          {"non_human_tracks", c.non_human_tracks},
          {"frame_width", c.frame_width},
          {"frame_height", c.frame_height},
          {"box_height_mean", c.box_height_mean},
          {"box_height_std", c.box_height_std},
          {"box_aspect", c.box_aspect},
          {"crop_height", c.crop_height},
          {"crop_width", c.crop_width},
          {"speed_mean", c.speed_mean},
          {"speed_std", c.speed_std},
          {"speed_jitter", c.speed_jitter},
          {"direction_mean", c.direction_mean},
          {"direction_std", c.direction_std},
          {"flow_noise", c.flow_noise},
          {"keypoint_count", c.keypoint_count},
          {"keypoint_noise", c.keypoint_noise},
          {"embedding_dim", c.embedding_dim},
          {"embedding_std", c.embedding_std},
          {"anomaly_fraction", c.anomaly_fraction},
          {"anomaly_run_length", c.anomaly_run_length},
          {"anomaly_types", types},
          {"speed_multiplier", c.speed_multiplier},
          {"pose_distortion", c.pose_distortion},
          {"embedding_shift", c.embedding_shift},
          {"human_class", c.human_class},
          {"confidence", c.confidence}};
}

SynthSummary generate_synthetic(const SynthConfig& config, const fs::path& root) {
  config.validate();
  SynthSummary summary;
  generate_split(config, root, Split::Train, summary);
  generate_split(config, root, Split::Test, summary);
  return summary;
}

}  // namespace vad
