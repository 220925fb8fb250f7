#pragma once

// On-disk dataset format.
//
//   <root>/<split>/manifest.json          split, keypoint_count, embedding_dim, clips[]
//   <root>/<split>/<clip>/objects.jsonl   one ObjectRecord per line
//   <root>/<split>/<clip>/flow/*.vadt     float32 flow crops, shape (h, w, 2)
//   <root>/test/<clip>/labels.txt         whitespace-separated 0/1, one per frame
//
// Flow stored for frame t is the displacement from frame t to t+1.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vad/tensor_io.hpp"

namespace vad {

enum class Split { Train, Test };

std::string to_string(Split split);
Split parse_split(const std::string& s);

struct BoundingBox {
  double x_min = 0, y_min = 0, x_max = 0, y_max = 0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  bool valid() const { return x_min < x_max && y_min < y_max; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct Keypoint {
  double x = 0, y = 0;
  friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

struct TensorRef {
  std::string path;  // relative to the split directory
  DType dtype = DType::Float32;
  std::vector<std::uint32_t> shape;

  friend bool operator==(const TensorRef&, const TensorRef&) = default;
};

// Flow vectors (x, y) in pixels/frame, row-major h × w × 2.
struct FlowCrop {
  int height = 0;
  int width = 0;
  std::vector<double> data;

  double x(int r, int c) const { return data[2 * (static_cast<std::size_t>(r) * width + c)]; }
  double y(int r, int c) const { return data[2 * (static_cast<std::size_t>(r) * width + c) + 1]; }

  friend bool operator==(const FlowCrop&, const FlowCrop&) = default;
};

struct ObjectRecord {
  std::string clip_id;
  int frame_index = 0;
  BoundingBox bbox;
  int class_label = 0;
  double confidence = 1.0;
  std::optional<TensorRef> flow_ref;
  std::optional<FlowCrop> flow;  // payload, filled when the loader reads tensors
  std::optional<std::vector<Keypoint>> keypoints;
  std::optional<std::vector<double>> embedding;
};

struct ClipManifest {
  std::string clip_id;
  int num_frames = 0;
  std::string objects_file;  // relative to the split directory

  friend bool operator==(const ClipManifest&, const ClipManifest&) = default;
};

struct DatasetManifest {
  Split split = Split::Train;
  std::vector<ClipManifest> clips;
  int keypoint_count = 17;
  std::optional<int> embedding_dim;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

struct ClipData {
  ClipManifest manifest;
  std::vector<ObjectRecord> objects;  // sorted by frame_index, stable within a frame
};

struct Dataset {
  std::filesystem::path split_dir;
  DatasetManifest manifest;
  std::vector<ClipData> clips;  // manifest order

  bool has_embeddings() const;
  bool has_keypoints() const;
  bool has_flow() const;
  std::size_t object_count() const;
};

struct LoadOptions {
  bool read_tensors = true;  // false: validate headers and sizes only
  unsigned threads = 1;
};

std::filesystem::path split_directory(const std::filesystem::path& root, Split split);

// Loads and validates <root>/<split>. Throws ValidationError naming the clip and
// line of a malformed record, or the file of a bad tensor.
Dataset load_dataset(const std::filesystem::path& root, Split split, const LoadOptions& options = {});

DatasetManifest load_manifest(const std::filesystem::path& root, Split split);

// clip_id -> per-frame 0/1 labels.
using GroundTruth = std::map<std::string, std::vector<int>>;

GroundTruth load_ground_truth(const std::filesystem::path& root, const DatasetManifest& manifest);

// Writer side, used by the synthetic generator and tests. Records are written in
// the given order; flow payloads are written as float32 tensors at flow_ref->path.
void write_manifest(const std::filesystem::path& root, const DatasetManifest& manifest);
void write_clip_objects(const std::filesystem::path& root, Split split, const ClipManifest& clip,
                        const std::vector<ObjectRecord>& objects);
void write_labels(const std::filesystem::path& root, const std::string& clip_id, const std::vector<int>& labels);

}  // namespace vad
