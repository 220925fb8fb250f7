#include "vad/artifact.hpp"

#include <fstream>

#include <json.hpp>

#include "vad/error.hpp"
#include "vad/rng.hpp"
#include "vad/version.hpp"

namespace vad {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kArtifactFile = "artifact.json";

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("'" + path.string() + "': " + e.what());
  }
}

Tensor f64(std::vector<std::uint32_t> shape, std::vector<double> values) {
  return Tensor{DType::Float64, std::move(shape), std::move(values)};
}

Tensor matrix_tensor(const FeatureMatrix& m) {
  return f64({static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())}, m.data());
}

FeatureMatrix tensor_matrix(const Tensor& t, const fs::path& origin) {
  if (t.shape.size() != 2) throw ValidationError("'" + origin.string() + "': expected a 2-D tensor");
  return FeatureMatrix(t.shape[0], t.shape[1], t.values);
}

Tensor load_model_tensor(const fs::path& dir, const json& header, const std::string& name) {
  const fs::path path = dir / header.at("tensors").at(name).get<std::string>();
  Tensor t = read_tensor(path);
  if (t.dtype != DType::Float64) throw ValidationError("'" + path.string() + "': model tensors must be float64");
  return t;
}

json model_header(const std::string& kind, Feature f, const PipelineConfig& c) {
  return {{"format", "vad-model"},
          {"format_version", kFormatVersion},
          {"tool_version", kToolVersion},
          {"kind", kind},
          {"feature", feature_name(f)},
          {"config_seed", c.seed}};
}

std::string save_gmm(const GmmModel& g, const fs::path& dir, const PipelineConfig& c) {
  const std::string base = "velocity_gmm";
  const auto n = static_cast<std::uint32_t>(g.components());
  const auto d = static_cast<std::uint32_t>(g.dim());
  std::vector<double> means, covs;
  for (std::size_t j = 0; j < g.components(); ++j) {
    means.insert(means.end(), g.means()[j].data(), g.means()[j].data() + d);
    // Column-major and row-major coincide for a symmetric matrix, but write row-major explicitly.
    for (std::uint32_t r = 0; r < d; ++r)
      for (std::uint32_t cc = 0; cc < d; ++cc) covs.push_back(g.covariances()[j](r, cc));
  }
  write_tensor(dir / (base + ".weights.vadt"), f64({n}, g.weights()));
  write_tensor(dir / (base + ".means.vadt"), f64({n, d}, means));
  write_tensor(dir / (base + ".covariances.vadt"), f64({n, d, d}, covs));
  json h = model_header("gmm", Feature::Velocity, c);
  h["hyperparameters"] = {{"components", c.gmm_components},
                          {"covariance_regularization", GmmFitOptions{}.covariance_regularization},
                          {"max_iterations", GmmFitOptions{}.max_iterations},
                          {"tolerance", GmmFitOptions{}.tolerance}};
  h["seed"] = derive_seed(c.seed, "gmm.velocity");
  h["tensors"] = {{"weights", base + ".weights.vadt"},
                  {"means", base + ".means.vadt"},
                  {"covariances", base + ".covariances.vadt"}};
  write_json(dir / (base + ".json"), h);
  return base + ".json";
}

GmmModel load_gmm(const fs::path& dir, const json& h) {
  const Tensor w = load_model_tensor(dir, h, "weights");
  const Tensor mu = load_model_tensor(dir, h, "means");
  const Tensor cov = load_model_tensor(dir, h, "covariances");
  if (w.shape.size() != 1 || mu.shape.size() != 2 || cov.shape.size() != 3 || mu.shape[0] != w.shape[0] ||
      cov.shape[0] != w.shape[0] || cov.shape[1] != mu.shape[1] || cov.shape[2] != mu.shape[1]) {
    throw ValidationError("'" + (dir / "velocity_gmm.json").string() + "': inconsistent GMM tensor shapes");
  }
  const auto n = w.shape[0];
  const auto d = static_cast<Eigen::Index>(mu.shape[1]);
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covs;
  for (std::uint32_t j = 0; j < n; ++j) {
    means.emplace_back(Eigen::Map<const Eigen::VectorXd>(mu.values.data() + j * d, d));
    Eigen::MatrixXd m(d, d);
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c) m(r, c) = cov.values[static_cast<std::size_t>(j * d * d + r * d + c)];
    covs.push_back(std::move(m));
  }
  return GmmModel(w.values, std::move(means), std::move(covs));
}

std::string save_distance(const DistanceModel& m, Feature f, const fs::path& dir, const PipelineConfig& c) {
  const std::string kind = m.exemplars ? "knn" : "kmeans";
  const std::string base = feature_name(f) + "_" + kind;
  json h = model_header(kind, f, c);
  if (m.exemplars) {
    const auto& ex = *m.exemplars;
    std::vector<double> row_clips(ex.row_clips().begin(), ex.row_clips().end());
    write_tensor(dir / (base + ".features.vadt"), matrix_tensor(ex.features()));
    write_tensor(dir / (base + ".row_clips.vadt"), f64({static_cast<std::uint32_t>(ex.size())}, row_clips));
    h["hyperparameters"] = {{"k", m.k}};
    h["clip_names"] = ex.clip_names();
    h["tensors"] = {{"features", base + ".features.vadt"}, {"row_clips", base + ".row_clips.vadt"}};
  } else {
    write_tensor(dir / (base + ".centroids.vadt"), matrix_tensor(m.centroids->centroids()));
    h["hyperparameters"] = {{"k_means", *c.kmeans_k}, {"max_iterations", KMeansOptions{}.max_iterations}};
    h["seed"] = derive_seed(c.seed, "kmeans." + feature_name(f));
    h["tensors"] = {{"centroids", base + ".centroids.vadt"}};
  }
  write_json(dir / (base + ".json"), h);
  return base + ".json";
}

DistanceModel load_distance(const fs::path& dir, const json& h) {
  DistanceModel m;
  const std::string kind = h.at("kind");
  if (kind == "knn") {
    m.k = h.at("hyperparameters").at("k");
    const FeatureMatrix features = tensor_matrix(load_model_tensor(dir, h, "features"), dir);
    const Tensor rc = load_model_tensor(dir, h, "row_clips");
    const auto names = h.at("clip_names").get<std::vector<std::string>>();
    if (rc.values.size() != features.rows()) throw ValidationError("kNN artifact: row_clips length mismatch");
    std::vector<std::string> clips;
    for (double v : rc.values) {
      const auto idx = static_cast<std::size_t>(v);
      if (v < 0 || idx >= names.size()) throw ValidationError("kNN artifact: bad clip index");
      clips.push_back(names[idx]);
    }
    m.exemplars = ExemplarIndex(features, clips);
  } else if (kind == "kmeans") {
    m.centroids = KMeansIndex(tensor_matrix(load_model_tensor(dir, h, "centroids"), dir));
  } else {
    throw ValidationError("unknown model kind '" + kind + "'");
  }
  return m;
}

}  // namespace

void save_artifact(const FittedModels& models, const fs::path& dir) {
  fs::create_directories(dir);
  json model_files = json::object();
  if (models.velocity) model_files["velocity"] = save_gmm(*models.velocity, dir, models.config);
  if (models.pose) model_files["pose"] = save_distance(*models.pose, Feature::Pose, dir, models.config);
  if (models.deep) model_files["deep"] = save_distance(*models.deep, Feature::Deep, dir, models.config);

  json calibration = json::object();
  for (const auto& [f, b] : models.calibration.bounds) {
    calibration[feature_name(f)] = {{"max", b.max}, {"min", b.min}, {"degenerate", b.degenerate()}};
  }
  json dims = json::object();
  for (const auto& [f, d] : models.feature_dims) dims[feature_name(f)] = d;

  const json a = {
      {"format", "vad-artifact"},
      {"format_version", kFormatVersion},
      {"tool", kToolName},
      {"tool_version", kToolVersion},
      {"config", config_to_json(models.config)},
      {"models", model_files},
      {"calibration", calibration},
      {"feature_dims", dims},
      {"keypoint_count", models.keypoint_count},
      {"embedding_dim", models.embedding_dim ? json(*models.embedding_dim) : json(nullptr)},
      {"pose_target",
       models.pose_target ? json{{"height", models.pose_target->height}, {"width", models.pose_target->width}}
                          : json(nullptr)},
  };
  write_json(dir / kArtifactFile, a);
}

FittedModels load_artifact(const fs::path& dir) {
  const fs::path path = dir / kArtifactFile;
  if (!fs::exists(path)) throw ValidationError("no artifact at '" + dir.string() + "' (missing artifact.json)");
  const json a = read_json(path);
  FittedModels m;
  try {
    if (a.at("format") != "vad-artifact") throw ValidationError("'" + path.string() + "' is not a vad artifact");
    if (a.at("format_version").get<int>() != kFormatVersion) {
      throw CompatibilityError("artifact format version " + a.at("format_version").dump() + " is not supported");
    }
    m.config = apply_config_json(a.at("config"), PipelineConfig{});
    m.keypoint_count = a.at("keypoint_count");
    if (!a.at("embedding_dim").is_null()) m.embedding_dim = a.at("embedding_dim").get<int>();
    if (!a.at("pose_target").is_null()) {
      m.pose_target = PoseTargetSize{a["pose_target"].at("height"), a["pose_target"].at("width")};
    }
    for (const auto& [name, b] : a.at("calibration").items()) {
      m.calibration.bounds[parse_feature(name)] = FeatureBounds{b.at("max"), b.at("min")};
    }
    for (const auto& [name, d] : a.at("feature_dims").items()) m.feature_dims[parse_feature(name)] = d;
    const auto& files = a.at("models");
    for (Feature f : m.config.features) {
      if (!files.contains(feature_name(f))) {
        throw ValidationError("artifact has no model for enabled feature '" + feature_name(f) + "'");
      }
      const json h = read_json(dir / files[feature_name(f)].get<std::string>());
      if (f == Feature::Velocity) {
        m.velocity = load_gmm(dir, h);
      } else {
        (f == Feature::Pose ? m.pose : m.deep) = load_distance(dir, h);
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError("malformed artifact '" + path.string() + "': " + e.what());
  }
  return m;
}

}  // namespace vad
