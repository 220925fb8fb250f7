#include "vad/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vad {

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("gaussian_kernel: sigma must be > 0");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * static_cast<std::size_t>(radius) + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = w;
    sum += w;
  }
  for (double& w : k) w /= sum;
  return k;
}

std::vector<double> smooth_scores(std::span<const double> scores, double sigma) {
  if (scores.empty()) throw std::invalid_argument("smooth_scores: empty score vector");
  const auto kernel = gaussian_kernel(sigma);
  const auto radius = static_cast<long>(kernel.size() / 2);
  const auto n = static_cast<long>(scores.size());
  std::vector<double> out(scores.size());
  for (long t = 0; t < n; ++t) {
    double acc = 0.0;
    double lo = scores[static_cast<std::size_t>(t)], hi = lo;
    for (long i = -radius; i <= radius; ++i) {
      const double v = scores[static_cast<std::size_t>(std::clamp(t + i, 0L, n - 1))];
      acc += kernel[static_cast<std::size_t>(i + radius)] * v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    // A convex combination; clamping only removes rounding overshoot.
    out[static_cast<std::size_t>(t)] = std::clamp(acc, lo, hi);
  }
  return out;
}

}  // namespace vad
