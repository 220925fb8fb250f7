#pragma once

#include <span>
#include <vector>

#include "vad/dataset.hpp"

namespace vad {

struct PoseTargetSize {
  double height = 0;
  double width = 0;
};

// Mean height and width of the (human) training boxes.
PoseTargetSize compute_pose_target_size(std::span<const BoundingBox> train_boxes);

// Moves keypoints into box-relative coordinates and scales each axis by its own
// extent so the box becomes target.width × target.height. Output is flattened
// as (x1, y1, x2, y2, ...). Out-of-box landmarks are not clamped.
std::vector<double> normalize_keypoints(std::span<const Keypoint> keypoints, const BoundingBox& bbox,
                                        const PoseTargetSize& target);

}  // namespace vad
