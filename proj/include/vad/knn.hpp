#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vad/feature_matrix.hpp"

namespace vad {

// Training exemplars with the clip each one came from.
class ExemplarIndex {
 public:
  ExemplarIndex() = default;
  ExemplarIndex(FeatureMatrix features, const std::vector<std::string>& clip_ids);

  const FeatureMatrix& features() const { return features_; }
  std::size_t size() const { return features_.rows(); }
  std::size_t dim() const { return features_.cols(); }

  const std::vector<std::string>& clip_names() const { return clip_names_; }
  const std::vector<int>& row_clips() const { return row_clips_; }
  std::string_view clip_of(std::size_t row) const { return clip_names_[row_clips_[row]]; }

  friend bool operator==(const ExemplarIndex&, const ExemplarIndex&) = default;

 private:
  FeatureMatrix features_;
  std::vector<std::string> clip_names_;  // sorted, unique
  std::vector<int> row_clips_;           // index into clip_names_
};

// Mean of the k smallest Euclidean distances from x to the exemplars, skipping
// rows from `exclude_clip`. With fewer than k rows left, averages what remains.
double knn_score(const ExemplarIndex& index, std::span<const double> x, int k,
                 std::optional<std::string_view> exclude_clip = std::nullopt);

}  // namespace vad
