#include "vad/pose.hpp"

#include "vad/error.hpp"

namespace vad {

PoseTargetSize compute_pose_target_size(std::span<const BoundingBox> train_boxes) {
  if (train_boxes.empty()) throw ValidationError("compute_pose_target_size: no human boxes in the training set");
  double h = 0.0, w = 0.0;
  for (const auto& b : train_boxes) {
    h += b.height();
    w += b.width();
  }
  const double n = static_cast<double>(train_boxes.size());
  return {h / n, w / n};
}

std::vector<double> normalize_keypoints(std::span<const Keypoint> keypoints, const BoundingBox& bbox,
                                        const PoseTargetSize& target) {
  if (!bbox.valid()) throw ValidationError("normalize_keypoints: degenerate bounding box");
  if (!(target.height > 0.0) || !(target.width > 0.0)) {
    throw ValidationError("normalize_keypoints: pose target size must be positive");
  }
  const double sx = target.width / bbox.width();
  const double sy = target.height / bbox.height();
  std::vector<double> out;
  out.reserve(2 * keypoints.size());
  for (const auto& p : keypoints) {
    out.push_back((p.x - bbox.x_min) * sx);
    out.push_back((p.y - bbox.y_min) * sy);
  }
  return out;
}

}  // namespace vad
