#pragma once

#include <optional>
#include <vector>

#include "vad/dataset.hpp"

namespace vad {

struct FlowSize {
  int height = 224;
  int width = 224;

  friend bool operator==(const FlowSize&, const FlowSize&) = default;
};

// Bilinear resize with corner-aligned sample positions. Each channel is
// resampled independently; flow values are not rescaled by the size ratio.
FlowCrop resize_flow_crop(const FlowCrop& crop, FlowSize target);

// Orientation bin of a nonzero flow vector: theta = atan2(y, x) wrapped to
// [0, 2π), bin b covers [2πb/B, 2π(b+1)/B).
int flow_orientation_bin(double x, double y, int bins);

// Mean L1 magnitude |x|+|y| of the vectors falling in each orientation bin.
// Zero vectors are skipped; empty bins are 0. With `height` set, magnitudes are
// divided by it first.
std::vector<double> velocity_histogram(const FlowCrop& crop, int bins, std::optional<double> height = std::nullopt);

}  // namespace vad
