#include "vad/velocity.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vad/error.hpp"

namespace vad {

FlowCrop resize_flow_crop(const FlowCrop& crop, FlowSize target) {
  if (crop.height < 1 || crop.width < 1 ||
      crop.data.size() != 2 * static_cast<std::size_t>(crop.height) * crop.width) {
    throw ValidationError("resize_flow_crop: empty or malformed flow crop");
  }
  if (target.height < 1 || target.width < 1) throw std::invalid_argument("resize_flow_crop: bad target size");
  if (crop.height == target.height && crop.width == target.width) return crop;

  FlowCrop out{target.height, target.width, std::vector<double>(2 * static_cast<std::size_t>(target.height) * target.width)};
  const double sy = target.height > 1 ? double(crop.height - 1) / (target.height - 1) : 0.0;
  const double sx = target.width > 1 ? double(crop.width - 1) / (target.width - 1) : 0.0;

  // Column weights are shared by every output row.
  std::vector<int> c0(target.width), c1(target.width);
  std::vector<double> wx(target.width);
  for (int c = 0; c < target.width; ++c) {
    const double pos = c * sx;
    c0[c] = std::min(static_cast<int>(pos), crop.width - 1);
    c1[c] = std::min(c0[c] + 1, crop.width - 1);
    wx[c] = pos - c0[c];
  }
  for (int r = 0; r < target.height; ++r) {
    const double pos = r * sy;
    const int r0 = std::min(static_cast<int>(pos), crop.height - 1);
    const int r1 = std::min(r0 + 1, crop.height - 1);
    const double wy = pos - r0;
    for (int c = 0; c < target.width; ++c) {
      for (int ch = 0; ch < 2; ++ch) {
        auto at = [&](int rr, int cc) { return crop.data[2 * (static_cast<std::size_t>(rr) * crop.width + cc) + ch]; };
        const double top = at(r0, c0[c]) * (1.0 - wx[c]) + at(r0, c1[c]) * wx[c];
        const double bottom = at(r1, c0[c]) * (1.0 - wx[c]) + at(r1, c1[c]) * wx[c];
        out.data[2 * (static_cast<std::size_t>(r) * target.width + c) + ch] = top * (1.0 - wy) + bottom * wy;
      }
    }
  }
  return out;
}

int flow_orientation_bin(double x, double y, int bins) {
  if (bins < 1) throw std::invalid_argument("flow_orientation_bin: bins must be >= 1");
  if (x == 0.0 && y == 0.0) throw std::invalid_argument("flow_orientation_bin: zero vector has no orientation");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double theta = std::atan2(y, x);
  if (theta < 0.0) theta += two_pi;
  int bin = static_cast<int>(std::floor(theta * bins / two_pi));
  // theta just below 0 can round up to exactly 2π after wrapping.
  if (bin >= bins) bin -= bins;
  return bin;
}

std::vector<double> velocity_histogram(const FlowCrop& crop, int bins, std::optional<double> height) {
  if (bins < 1) throw std::invalid_argument("velocity_histogram: bins must be >= 1");
  if (height && !(*height > 0.0)) throw std::invalid_argument("velocity_histogram: height must be positive");
  std::vector<double> sum(bins, 0.0);
  std::vector<std::size_t> count(bins, 0);
  const std::size_t n = static_cast<std::size_t>(crop.height) * crop.width;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = crop.data[2 * i];
    const double y = crop.data[2 * i + 1];
    double m = std::abs(x) + std::abs(y);
    if (m == 0.0) continue;
    if (height) m /= *height;
    const int b = bins == 1 ? 0 : flow_orientation_bin(x, y, bins);
    sum[b] += m;
    ++count[b];
  }
  for (int b = 0; b < bins; ++b) sum[b] = count[b] ? sum[b] / static_cast<double>(count[b]) : 0.0;
  return sum;
}

}  // namespace vad
