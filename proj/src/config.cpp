#include "vad/config.hpp"

#include <fstream>

#include "vad/error.hpp"

namespace vad {
using nlohmann::json;

namespace {

// Flattens {"a": {"b": 1}} into {"a.b": 1}; arrays and scalars are leaves.
void flatten(const json& j, const std::string& prefix, json& out) {
  for (const auto& [key, value] : j.items()) {
    const std::string name = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      flatten(value, name, out);
    } else {
      out[name] = value;
    }
  }
}

}  // namespace

void PipelineConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ValidationError("config: " + what);
  };
  require(!features.empty(), "fusion.features must enable at least one feature");
  require(velocity_bins >= 1, "velocity.bins must be >= 1");
  require(velocity_resize.height >= 1 && velocity_resize.width >= 1, "velocity.resize must be positive");
  require(pose_keypoints >= 1, "pose.keypoints must be >= 1");
  require(gmm_components >= 1, "gmm.components must be >= 1");
  require(knn_k >= 1, "knn.k must be >= 1");
  require(!kmeans_k || *kmeans_k >= 1, "kmeans.k must be >= 1");
  require(smoothing_sigma >= 0.0, "smoothing.sigma must be >= 0 (0 disables smoothing)");
  require(!detector_confidence_threshold ||
              (*detector_confidence_threshold > 0.0 && *detector_confidence_threshold <= 1.0),
          "detector.confidence_threshold must be in (0, 1]");
}

std::vector<std::string> profile_names() { return {"default", "ped2-like", "shanghaitech-like"}; }

PipelineConfig profile_config(const std::string& name) {
  PipelineConfig c;
  c.profile = name;
  if (name == "default") return c;
  if (name == "ped2-like") {
    c.velocity_bins = 1;
    c.gmm_components = 2;
    c.features = {Feature::Velocity, Feature::Deep};
    c.detector_confidence_threshold = 0.5;
    return c;
  }
  if (name == "shanghaitech-like") {
    c.velocity_normalize_by_height = true;
    return c;
  }
  throw ValidationError("unknown profile '" + name + "'");
}

PipelineConfig apply_config_json(const json& j, PipelineConfig c) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  json flat = json::object();
  flatten(j, "", flat);
  try {
    if (flat.contains("profile")) {
      const auto seed = c.seed;
      c = profile_config(flat["profile"].get<std::string>());
      c.seed = seed;
    }
    for (const auto& [key, v] : flat.items()) {
      if (key == "profile") continue;
      if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "fusion.features") {
        c.features.clear();
        for (const auto& f : v) c.features.insert(parse_feature(f.get<std::string>()));
      } else if (key == "velocity.bins") c.velocity_bins = v.get<int>();
      else if (key == "velocity.resize") {
        if (v.is_number_integer()) {
          c.velocity_resize = {v.get<int>(), v.get<int>()};
        } else {
          if (!v.is_array() || v.size() != 2) throw ValidationError("config: velocity.resize must be [h, w]");
          c.velocity_resize = {v[0].get<int>(), v[1].get<int>()};
        }
      } else if (key == "velocity.normalize_by_height") c.velocity_normalize_by_height = v.get<bool>();
      else if (key == "pose.keypoints") c.pose_keypoints = v.get<int>();
      else if (key == "pose.human_class") c.pose_human_class = v.get<int>();
      else if (key == "gmm.components") c.gmm_components = v.get<int>();
      else if (key == "knn.k") c.knn_k = v.get<int>();
      else if (key == "kmeans.k") c.kmeans_k = v.is_null() ? std::nullopt : std::optional<int>(v.get<int>());
      else if (key == "smoothing.sigma") c.smoothing_sigma = v.get<double>();
      else if (key == "detector.confidence_threshold")
        c.detector_confidence_threshold = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
      else throw ValidationError("config: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

json config_to_json(const PipelineConfig& c) {
  json features = json::array();
  for (Feature f : c.features) features.push_back(feature_name(f));
  return {{"profile", c.profile},
          {"seed", c.seed},
          {"fusion", {{"features", features}}},
          {"velocity",
           {{"bins", c.velocity_bins},
            {"resize", {c.velocity_resize.height, c.velocity_resize.width}},
            {"normalize_by_height", c.velocity_normalize_by_height}}},
          {"pose", {{"keypoints", c.pose_keypoints}, {"human_class", c.pose_human_class}}},
          {"gmm", {{"components", c.gmm_components}}},
          {"knn", {{"k", c.knn_k}}},
          {"kmeans", {{"k", c.kmeans_k ? json(*c.kmeans_k) : json(nullptr)}}},
          {"smoothing", {{"sigma", c.smoothing_sigma}}},
          {"detector",
           {{"confidence_threshold",
             c.detector_confidence_threshold ? json(*c.detector_confidence_threshold) : json(nullptr)}}}};
}

PipelineConfig load_config_file(const std::filesystem::path& path, const PipelineConfig& base) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config file '" + path.string() + "': " + e.what());
  }
  if (j.is_object() && j.value("format", "") == "vad-artifact") {
    if (!j.contains("config")) throw ValidationError("artifact '" + path.string() + "' has no config snapshot");
    return apply_config_json(j["config"], base);
  }
  return apply_config_json(j, base);
}

}  // namespace vad
