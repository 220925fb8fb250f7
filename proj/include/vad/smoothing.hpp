#pragma once

#include <span>
#include <vector>

namespace vad {

// Normalized Gaussian kernel of radius ceil(3σ), length 2r+1.
std::vector<double> gaussian_kernel(double sigma);

// Temporal 1-D Gaussian filter with edge replication; output length = input length.
std::vector<double> smooth_scores(std::span<const double> scores, double sigma);

}  // namespace vad
