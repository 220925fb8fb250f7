#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vad/dataset.hpp"

namespace vad::test {

inline FlowCrop constant_flow(int h, int w, double x, double y) {
  FlowCrop c{h, w, {}};
  for (int i = 0; i < h * w; ++i) {
    c.data.push_back(x);
    c.data.push_back(y);
  }
  return c;
}

inline std::vector<Keypoint> line_keypoints(const BoundingBox& b, int d) {
  std::vector<Keypoint> k;
  for (int i = 0; i < d; ++i) {
    const double t = (i + 0.5) / d;
    k.push_back({b.x_min + t * b.width(), b.y_min + t * b.height()});
  }
  return k;
}

inline ObjectRecord make_object(const std::string& clip, int frame, int slot, double vx, int d = 17,
                                int embedding_dim = 4) {
  ObjectRecord r;
  r.clip_id = clip;
  r.frame_index = frame;
  r.bbox = {10.0 + slot * 50, 20.0, 40.0 + slot * 50, 100.0};
  r.class_label = 0;
  r.confidence = 0.9;
  r.flow = constant_flow(4, 3, vx, 0.25);
  r.flow_ref = TensorRef{clip + "/flow/" + std::to_string(frame) + "_" + std::to_string(slot) + ".vadt",
                         DType::Float32, {4, 3, 2}};
  r.keypoints = line_keypoints(r.bbox, d);
  if (embedding_dim > 0) r.embedding = std::vector<double>(static_cast<std::size_t>(embedding_dim), 0.5 * slot);
  return r;
}

// Two clips with `frames` frames and one object per frame (clip b has none on frame 0).
inline DatasetManifest write_small_split(const std::filesystem::path& root, Split split, int frames = 3) {
  DatasetManifest m;
  m.split = split;
  m.keypoint_count = 17;
  m.embedding_dim = 4;
  for (const std::string id : {"a", "b"}) {
    ClipManifest c{id, frames, id + "/objects.jsonl"};
    std::vector<ObjectRecord> objs;
    for (int f = (id == "b" ? 1 : 0); f < frames; ++f) objs.push_back(make_object(id, f, 0, 1.0 + f));
    write_clip_objects(root, split, c, objs);
    m.clips.push_back(c);
  }
  write_manifest(root, m);
  return m;
}

}  // namespace vad::test
