#include "vad/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vad/error.hpp"
#include "vad/parallel.hpp"
#include "vad/version.hpp"

namespace vad {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifestName = "manifest.json";
constexpr const char* kLabelsName = "labels.txt";

struct RecordContext {
  const std::string& clip_id;
  std::size_t line;

  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("clip '" + clip_id + "' objects line " + std::to_string(line) + ": " + what);
  }
};

bool is_safe_relative(const std::string& p) {
  const fs::path path(p);
  if (p.empty() || path.is_absolute()) return false;
  return std::none_of(path.begin(), path.end(), [](const fs::path& part) { return part == ".."; });
}

double finite_number(const json& j, const char* field, const RecordContext& ctx) {
  if (!j.is_number()) ctx.fail(std::string("field '") + field + "' must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) ctx.fail(std::string("field '") + field + "' is not finite");
  return v;
}

ObjectRecord parse_record(const std::string& text, const ClipManifest& clip, const DatasetManifest& manifest,
                          std::size_t line) {
  const RecordContext ctx{clip.clip_id, line};
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    ctx.fail(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) ctx.fail("record must be a JSON object");

  ObjectRecord r;
  r.clip_id = clip.clip_id;
  if (j.contains("clip_id")) {
    if (!j["clip_id"].is_string() || j["clip_id"].get<std::string>() != clip.clip_id) {
      ctx.fail("clip_id does not match the manifest clip");
    }
  }

  if (!j.contains("frame_index") || !j["frame_index"].is_number_integer()) ctx.fail("missing integer 'frame_index'");
  const auto frame = j["frame_index"].get<long long>();
  if (frame < 0 || frame >= clip.num_frames) {
    ctx.fail("frame_index " + std::to_string(frame) + " outside [0, " + std::to_string(clip.num_frames) + ")");
  }
  r.frame_index = static_cast<int>(frame);

  if (!j.contains("bbox") || !j["bbox"].is_array() || j["bbox"].size() != 4) {
    ctx.fail("'bbox' must be [x_min, y_min, x_max, y_max]");
  }
  const auto& b = j["bbox"];
  r.bbox = {finite_number(b[0], "bbox", ctx), finite_number(b[1], "bbox", ctx), finite_number(b[2], "bbox", ctx),
            finite_number(b[3], "bbox", ctx)};
  if (!r.bbox.valid()) ctx.fail("degenerate bbox (need x_min < x_max and y_min < y_max)");

  if (!j.contains("class_label") || !j["class_label"].is_number_integer()) ctx.fail("missing integer 'class_label'");
  r.class_label = j["class_label"].get<int>();

  if (j.contains("confidence")) {
    r.confidence = finite_number(j["confidence"], "confidence", ctx);
    if (r.confidence < 0.0 || r.confidence > 1.0) ctx.fail("confidence outside [0, 1]");
  }

  if (j.contains("flow") && !j["flow"].is_null()) {
    const auto& f = j["flow"];
    if (!f.is_object() || !f.contains("path") || !f["path"].is_string() || !f.contains("shape") ||
        !f["shape"].is_array()) {
      ctx.fail("'flow' must be {path, dtype, shape}");
    }
    TensorRef ref;
    ref.path = f["path"].get<std::string>();
    if (!is_safe_relative(ref.path)) ctx.fail("flow path '" + ref.path + "' must be relative to the split directory");
    if (f.value("dtype", std::string("float32")) != "float32") ctx.fail("flow dtype must be float32");
    for (const auto& d : f["shape"]) {
      if (!d.is_number_unsigned()) ctx.fail("flow shape entries must be non-negative integers");
      ref.shape.push_back(d.get<std::uint32_t>());
    }
    if (ref.shape.size() != 3 || ref.shape[2] != 2 || ref.shape[0] == 0 || ref.shape[1] == 0) {
      ctx.fail("flow shape must be [h, w, 2] with h, w >= 1");
    }
    r.flow_ref = std::move(ref);
  }

  if (j.contains("keypoints") && !j["keypoints"].is_null()) {
    const auto& k = j["keypoints"];
    if (!k.is_array()) ctx.fail("'keypoints' must be an array of [x, y] pairs");
    if (static_cast<int>(k.size()) != manifest.keypoint_count) {
      ctx.fail("keypoints has " + std::to_string(k.size()) + " entries, expected " +
               std::to_string(manifest.keypoint_count));
    }
    std::vector<Keypoint> kps;
    kps.reserve(k.size());
    for (const auto& p : k) {
      if (!p.is_array() || p.size() != 2) ctx.fail("each keypoint must be [x, y]");
      kps.push_back({finite_number(p[0], "keypoints", ctx), finite_number(p[1], "keypoints", ctx)});
    }
    r.keypoints = std::move(kps);
  }

  if (j.contains("embedding") && !j["embedding"].is_null()) {
    const auto& e = j["embedding"];
    if (!e.is_array()) ctx.fail("'embedding' must be an array of numbers");
    if (!manifest.embedding_dim) ctx.fail("record has an embedding but the manifest declares no embedding_dim");
    if (static_cast<int>(e.size()) != *manifest.embedding_dim) {
      ctx.fail("embedding has " + std::to_string(e.size()) + " entries, expected " +
               std::to_string(*manifest.embedding_dim));
    }
    std::vector<double> emb;
    emb.reserve(e.size());
    for (const auto& v : e) emb.push_back(finite_number(v, "embedding", ctx));
    r.embedding = std::move(emb);
  }
  return r;
}

void load_flow(ObjectRecord& r, const fs::path& split_dir, bool read_payload) {
  const TensorRef& ref = *r.flow_ref;
  const fs::path file = split_dir / ref.path;
  if (!fs::exists(file)) throw ValidationError("tensor file '" + file.string() + "' does not exist");
  if (!read_payload) {
    const TensorHeader h = read_tensor_header(file);
    if (h.dtype != DType::Float32) throw ValidationError("tensor file '" + file.string() + "': dtype must be float32");
    if (h.shape != ref.shape) throw ValidationError("tensor file '" + file.string() + "': shape differs from record");
    return;
  }
  Tensor t = read_tensor(file);
  if (t.dtype != DType::Float32) throw ValidationError("tensor file '" + file.string() + "': dtype must be float32");
  if (t.shape != ref.shape) throw ValidationError("tensor file '" + file.string() + "': shape differs from record");
  if (!std::all_of(t.values.begin(), t.values.end(), [](double v) { return std::isfinite(v); })) {
    throw ValidationError("tensor file '" + file.string() + "': non-finite flow value");
  }
  r.flow = FlowCrop{static_cast<int>(ref.shape[0]), static_cast<int>(ref.shape[1]), std::move(t.values)};
}

ClipData load_clip(const fs::path& split_dir, const ClipManifest& clip, const DatasetManifest& manifest,
                   const LoadOptions& options) {
  ClipData data{clip, {}};
  const fs::path file = split_dir / clip.objects_file;
  std::ifstream in(file);
  if (!in) throw ValidationError("clip '" + clip.clip_id + "': cannot open objects file '" + file.string() + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ObjectRecord r = parse_record(line, clip, manifest, line_no);
    if (r.flow_ref) load_flow(r, split_dir, options.read_tensors);
    data.objects.push_back(std::move(r));
  }
  std::stable_sort(data.objects.begin(), data.objects.end(),
                   [](const ObjectRecord& a, const ObjectRecord& b) { return a.frame_index < b.frame_index; });
  if (manifest.split == Split::Train && fs::exists(split_dir / clip.clip_id / kLabelsName)) {
    throw ValidationError("clip '" + clip.clip_id + "': train split must not contain ground-truth labels");
  }
  return data;
}

json manifest_to_json(const DatasetManifest& m) {
  json clips = json::array();
  for (const auto& c : m.clips) {
    clips.push_back({{"clip_id", c.clip_id}, {"num_frames", c.num_frames}, {"objects_file", c.objects_file}});
  }
  return {{"format", "vad-dataset"},
          {"format_version", kFormatVersion},
          {"split", to_string(m.split)},
          {"keypoint_count", m.keypoint_count},
          {"embedding_dim", m.embedding_dim ? json(*m.embedding_dim) : json(nullptr)},
          {"clips", clips}};
}

DatasetManifest manifest_from_json(const json& j, const fs::path& origin) {
  auto fail = [&](const std::string& what) -> void {
    throw ValidationError("manifest '" + origin.string() + "': " + what);
  };
  DatasetManifest m;
  if (!j.is_object()) fail("must be a JSON object");
  if (!j.contains("split") || !j["split"].is_string()) fail("missing 'split'");
  try {
    m.split = parse_split(j["split"].get<std::string>());
  } catch (const ValidationError& e) {
    fail(e.what());
  }
  if (j.contains("keypoint_count")) {
    if (!j["keypoint_count"].is_number_integer() || j["keypoint_count"].get<int>() < 1) {
      fail("'keypoint_count' must be a positive integer");
    }
    m.keypoint_count = j["keypoint_count"].get<int>();
  }
  if (j.contains("embedding_dim") && !j["embedding_dim"].is_null()) {
    if (!j["embedding_dim"].is_number_integer() || j["embedding_dim"].get<int>() < 1) {
      fail("'embedding_dim' must be a positive integer or null");
    }
    m.embedding_dim = j["embedding_dim"].get<int>();
  }
  if (!j.contains("clips") || !j["clips"].is_array()) fail("missing 'clips' array");
  std::set<std::string> seen;
  for (const auto& c : j["clips"]) {
    ClipManifest clip;
    if (!c.is_object() || !c.contains("clip_id") || !c["clip_id"].is_string()) fail("clip entry missing 'clip_id'");
    clip.clip_id = c["clip_id"].get<std::string>();
    if (!is_safe_relative(clip.clip_id) || clip.clip_id.find_first_of(" \t\r\n#/\\") != std::string::npos) fail("invalid clip_id '" + clip.clip_id + "'");
    if (!seen.insert(clip.clip_id).second) fail("duplicate clip_id '" + clip.clip_id + "'");
    if (!c.contains("num_frames") || !c["num_frames"].is_number_integer() || c["num_frames"].get<long long>() < 1) {
      fail("clip '" + clip.clip_id + "': 'num_frames' must be an integer >= 1");
    }
    clip.num_frames = c["num_frames"].get<int>();
    clip.objects_file = c.value("objects_file", clip.clip_id + "/objects.jsonl");
    if (!is_safe_relative(clip.objects_file)) fail("clip '" + clip.clip_id + "': objects_file must be relative");
    m.clips.push_back(std::move(clip));
  }
  return m;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace

std::string to_string(Split split) { return split == Split::Train ? "train" : "test"; }

Split parse_split(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "test") return Split::Test;
  throw ValidationError("unknown split '" + s + "' (expected train or test)");
}

bool Dataset::has_embeddings() const {
  for (const auto& c : clips)
    for (const auto& o : c.objects)
      if (o.embedding) return true;
  return false;
}

bool Dataset::has_keypoints() const {
  for (const auto& c : clips)
    for (const auto& o : c.objects)
      if (o.keypoints) return true;
  return false;
}

bool Dataset::has_flow() const {
  for (const auto& c : clips)
    for (const auto& o : c.objects)
      if (o.flow_ref) return true;
  return false;
}

std::size_t Dataset::object_count() const {
  std::size_t n = 0;
  for (const auto& c : clips) n += c.objects.size();
  return n;
}

fs::path split_directory(const fs::path& root, Split split) { return root / to_string(split); }

DatasetManifest load_manifest(const fs::path& root, Split split) {
  const fs::path path = split_directory(root, split) / kManifestName;
  std::ifstream in(path);
  if (!in) throw ValidationError("missing manifest '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("manifest '" + path.string() + "': malformed JSON: " + e.what());
  }
  DatasetManifest m = manifest_from_json(j, path);
  if (m.split != split) {
    throw ValidationError("manifest '" + path.string() + "' declares split '" + to_string(m.split) + "'");
  }
  return m;
}

Dataset load_dataset(const fs::path& root, Split split, const LoadOptions& options) {
  Dataset ds;
  ds.split_dir = split_directory(root, split);
  ds.manifest = load_manifest(root, split);
  ds.clips.resize(ds.manifest.clips.size());
  parallel_for(ds.clips.size(), options.threads, [&](std::size_t i) {
    ds.clips[i] = load_clip(ds.split_dir, ds.manifest.clips[i], ds.manifest, options);
  });
  return ds;
}

GroundTruth load_ground_truth(const fs::path& root, const DatasetManifest& manifest) {
  if (manifest.split != Split::Test) throw ValidationError("ground truth is only defined for the test split");
  GroundTruth gt;
  const fs::path dir = split_directory(root, Split::Test);
  for (const auto& clip : manifest.clips) {
    const fs::path path = dir / clip.clip_id / kLabelsName;
    std::ifstream in(path);
    if (!in) throw ValidationError("clip '" + clip.clip_id + "': missing labels file '" + path.string() + "'");
    std::vector<int> labels;
    std::string token;
    while (in >> token) {
      if (token != "0" && token != "1") {
        throw ValidationError("labels '" + path.string() + "': label '" + token + "' at position " +
                              std::to_string(labels.size()) + " is not 0 or 1");
      }
      labels.push_back(token == "1" ? 1 : 0);
    }
    if (static_cast<int>(labels.size()) != clip.num_frames) {
      throw ValidationError("labels '" + path.string() + "': " + std::to_string(labels.size()) +
                            " labels for a clip of " + std::to_string(clip.num_frames) + " frames");
    }
    gt.emplace(clip.clip_id, std::move(labels));
  }
  return gt;
}

void write_manifest(const fs::path& root, const DatasetManifest& manifest) {
  const fs::path dir = split_directory(root, manifest.split);
  fs::create_directories(dir);
  write_text(dir / kManifestName, manifest_to_json(manifest).dump(2) + "\n");
}

void write_clip_objects(const fs::path& root, Split split, const ClipManifest& clip,
                        const std::vector<ObjectRecord>& objects) {
  const fs::path dir = split_directory(root, split);
  const fs::path objects_path = dir / clip.objects_file;
  fs::create_directories(objects_path.parent_path());
  std::ostringstream out;
  for (const auto& r : objects) {
    json j = {{"clip_id", clip.clip_id},
              {"frame_index", r.frame_index},
              {"bbox", {r.bbox.x_min, r.bbox.y_min, r.bbox.x_max, r.bbox.y_max}},
              {"class_label", r.class_label},
              {"confidence", r.confidence}};
    if (r.flow_ref) {
      if (!r.flow) throw std::invalid_argument("write_clip_objects: flow_ref without flow payload");
      const fs::path tensor_path = dir / r.flow_ref->path;
      fs::create_directories(tensor_path.parent_path());
      write_tensor(tensor_path, Tensor{DType::Float32, r.flow_ref->shape, r.flow->data});
      j["flow"] = {{"path", r.flow_ref->path}, {"dtype", "float32"}, {"shape", r.flow_ref->shape}};
    }
    if (r.keypoints) {
      json kps = json::array();
      for (const auto& k : *r.keypoints) kps.push_back({k.x, k.y});
      j["keypoints"] = std::move(kps);
    }
    if (r.embedding) j["embedding"] = *r.embedding;
    out << j.dump() << '\n';
  }
  write_text(objects_path, out.str());
}

void write_labels(const fs::path& root, const std::string& clip_id, const std::vector<int>& labels) {
  const fs::path dir = split_directory(root, Split::Test) / clip_id;
  fs::create_directories(dir);
  std::ostringstream out;
  for (std::size_t i = 0; i < labels.size(); ++i) out << (i ? " " : "") << labels[i];
  out << '\n';
  write_text(dir / kLabelsName, out.str());
}

}  // namespace vad
