#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "vad/feature_matrix.hpp"

namespace vad {

// Uniform double in [0, 1) from the top 53 bits; stable across standard libraries.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double squared_distance(std::span<const double> a, std::span<const double> b);
double euclidean_distance(std::span<const double> a, std::span<const double> b);

// k-means++ seeding: first center uniform, the rest drawn proportionally to the
// squared distance to the nearest chosen center. Returns distinct row indices.
std::vector<std::size_t> kmeans_plus_plus(const FeatureMatrix& points, std::size_t k, std::mt19937_64& rng);

struct KMeansOptions {
  int max_iterations = 300;
};

class KMeansIndex {
 public:
  KMeansIndex() = default;
  explicit KMeansIndex(FeatureMatrix centroids);

  const FeatureMatrix& centroids() const { return centroids_; }
  std::size_t size() const { return centroids_.rows(); }
  std::size_t dim() const { return centroids_.cols(); }

  friend bool operator==(const KMeansIndex&, const KMeansIndex&) = default;

 private:
  FeatureMatrix centroids_;
};

struct KMeansFit {
  KMeansIndex index;
  std::vector<double> inertia_trace;  // within-cluster sum of squares after each assignment step
  int iterations = 0;
  bool converged = false;
};

// Lloyd iterations until the assignment stops changing or max_iterations.
// Empty clusters are re-seeded from the point farthest from its centroid;
// clusters still empty at the end are dropped.
KMeansFit fit_kmeans(const FeatureMatrix& points, std::size_t k, std::uint64_t seed, const KMeansOptions& options = {});

// Euclidean distance to the nearest centroid.
double kmeans_score(const KMeansIndex& index, std::span<const double> x);

}  // namespace vad
