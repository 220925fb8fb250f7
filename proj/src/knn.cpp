#include "vad/knn.hpp"

#include <algorithm>
#include <stdexcept>

#include "vad/error.hpp"
#include "vad/kmeans.hpp"

namespace vad {

ExemplarIndex::ExemplarIndex(FeatureMatrix features, const std::vector<std::string>& clip_ids)
    : features_(std::move(features)) {
  if (clip_ids.size() != features_.rows()) {
    throw std::invalid_argument("ExemplarIndex: clip_ids length must equal the row count");
  }
  clip_names_ = clip_ids;
  std::sort(clip_names_.begin(), clip_names_.end());
  clip_names_.erase(std::unique(clip_names_.begin(), clip_names_.end()), clip_names_.end());
  row_clips_.reserve(clip_ids.size());
  for (const auto& id : clip_ids) {
    row_clips_.push_back(
        static_cast<int>(std::lower_bound(clip_names_.begin(), clip_names_.end(), id) - clip_names_.begin()));
  }
}

double knn_score(const ExemplarIndex& index, std::span<const double> x, int k,
                 std::optional<std::string_view> exclude_clip) {
  if (k < 1) throw std::invalid_argument("knn_score: k must be >= 1");
  if (x.size() != index.dim()) {
    throw CompatibilityError("knn_score: query has dimension " + std::to_string(x.size()) + ", index has " +
                             std::to_string(index.dim()));
  }
  int excluded = -1;
  if (exclude_clip) {
    const auto& names = index.clip_names();
    auto it = std::lower_bound(names.begin(), names.end(), *exclude_clip);
    if (it != names.end() && *it == *exclude_clip) excluded = static_cast<int>(it - names.begin());
  }
  std::vector<double> dist;
  dist.reserve(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index.row_clips()[i] == excluded) continue;
    dist.push_back(euclidean_distance(x, index.features().row(i)));
  }
  if (dist.empty()) {
    throw ValidationError("knn_score: no exemplars left after excluding clip '" +
                          std::string(exclude_clip.value_or("")) + "'");
  }
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), dist.size());
  std::nth_element(dist.begin(), dist.begin() + (kk - 1), dist.end());
  std::sort(dist.begin(), dist.begin() + kk);
  double sum = 0.0;
  for (std::size_t i = 0; i < kk; ++i) sum += dist[i];
  return sum / static_cast<double>(kk);
}

}  // namespace vad
