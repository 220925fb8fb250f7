#include "vad/kmeans.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "vad/error.hpp"

namespace vad {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

std::vector<std::size_t> kmeans_plus_plus(const FeatureMatrix& points, std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = points.rows();
  if (k == 0 || k > n) throw std::invalid_argument("kmeans_plus_plus: need 1 <= k <= rows");
  std::vector<std::size_t> chosen;
  std::vector<bool> taken(n, false);
  auto pick_uniform_untaken = [&] {
    const std::size_t remaining = n - chosen.size();
    std::size_t target = std::min<std::size_t>(static_cast<std::size_t>(uniform01(rng) * remaining), remaining - 1);
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      if (target-- == 0) return i;
    }
    return n - 1;
  };
  auto take = [&](std::size_t i) {
    chosen.push_back(i);
    taken[i] = true;
  };

  take(pick_uniform_untaken());
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points.row(i), points.row(chosen[0]));
  while (chosen.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (!taken[i]) total += d2[i];
    std::size_t next = n;
    if (total > 0.0) {
      double u = uniform01(rng) * total;
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i] || d2[i] == 0.0) continue;
        next = i;
        if (u < d2[i]) break;
        u -= d2[i];
      }
    }
    // Every remaining point coincides with a chosen center.
    if (next == n) next = pick_uniform_untaken();
    take(next);
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(points.row(i), points.row(next)));
  }
  return chosen;
}

KMeansIndex::KMeansIndex(FeatureMatrix centroids) : centroids_(std::move(centroids)) {
  if (centroids_.empty()) throw std::invalid_argument("KMeansIndex: no centroids");
}

KMeansFit fit_kmeans(const FeatureMatrix& points, std::size_t k, std::uint64_t seed, const KMeansOptions& options) {
  const std::size_t n = points.rows();
  const std::size_t dim = points.cols();
  if (k < 1) throw ValidationError("fit_kmeans: k must be >= 1");
  if (n < k) {
    throw ValidationError("fit_kmeans: " + std::to_string(n) + " points cannot support " + std::to_string(k) +
                          " clusters");
  }
  for (double v : points.data())
    if (!std::isfinite(v)) throw ValidationError("fit_kmeans: non-finite feature value");

  std::mt19937_64 rng(seed);
  FeatureMatrix centroids(k, dim);
  const auto seeds = kmeans_plus_plus(points, k, rng);
  for (std::size_t j = 0; j < k; ++j) std::copy_n(points.row(seeds[j]).begin(), dim, centroids.row(j).begin());

  KMeansFit fit;
  std::vector<std::size_t> assign(n, k), previous;
  std::vector<double> dist(n);
  for (int it = 0;; ++it) {
    previous = assign;
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (std::size_t j = 0; j < k; ++j) {
        const double d = squared_distance(points.row(i), centroids.row(j));
        if (d < best) {
          best = d;
          arg = j;
        }
      }
      assign[i] = arg;
      dist[i] = best;
      inertia += best;
    }
    fit.inertia_trace.push_back(inertia);
    fit.iterations = it;
    if (assign == previous) {
      fit.converged = true;
      break;
    }
    if (it >= options.max_iterations) break;

    FeatureMatrix sums(k, dim);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto row = sums.row(assign[i]);
      const auto p = points.row(i);
      for (std::size_t c = 0; c < dim; ++c) row[c] += p[c];
      ++counts[assign[i]];
    }
    std::vector<bool> donor_used(n, false);
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] > 0) {
        for (std::size_t c = 0; c < dim; ++c) centroids(j, c) = sums(j, c) / static_cast<double>(counts[j]);
        continue;
      }
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (donor_used[i]) continue;
        if (far == n || dist[i] > dist[far]) far = i;
      }
      if (far == n) continue;
      donor_used[far] = true;
      std::copy_n(points.row(far).begin(), dim, centroids.row(j).begin());
    }
  }

  std::vector<std::size_t> counts(k, 0);
  for (std::size_t a : assign) ++counts[a];
  FeatureMatrix kept;
  for (std::size_t j = 0; j < k; ++j)
    if (counts[j] > 0) kept.push_row(centroids.row(j));
  fit.index = KMeansIndex(std::move(kept));
  return fit;
}

double kmeans_score(const KMeansIndex& index, std::span<const double> x) {
  if (index.size() == 0) throw std::invalid_argument("kmeans_score: empty index");
  if (x.size() != index.dim()) {
    throw CompatibilityError("kmeans_score: query has dimension " + std::to_string(x.size()) + ", index has " +
                             std::to_string(index.dim()));
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < index.size(); ++j) best = std::min(best, squared_distance(x, index.centroids().row(j)));
  return std::sqrt(best);
}

}  // namespace vad
