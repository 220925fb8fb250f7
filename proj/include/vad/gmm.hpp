#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vad/feature_matrix.hpp"

namespace vad {

// Full-covariance Gaussian mixture. Construction validates the parameters and
// caches a Cholesky factor per component; the model is immutable afterwards and
// safe to score from many threads.
class GmmModel {
 public:
  GmmModel() = default;
  GmmModel(std::vector<double> weights, std::vector<Eigen::VectorXd> means, std::vector<Eigen::MatrixXd> covariances);

  std::size_t components() const { return weights_.size(); }
  std::size_t dim() const { return means_.empty() ? 0 : static_cast<std::size_t>(means_.front().size()); }

  const std::vector<double>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& means() const { return means_; }
  const std::vector<Eigen::MatrixXd>& covariances() const { return covariances_; }

  // log N(x | mean_j, cov_j), without the mixture weight.
  double component_log_density(std::size_t j, std::span<const double> x) const;
  double log_density(std::span<const double> x) const;

 private:
  std::vector<double> weights_;
  std::vector<Eigen::VectorXd> means_;
  std::vector<Eigen::MatrixXd> covariances_;
  std::vector<Eigen::MatrixXd> chol_lower_;
  std::vector<double> log_det_;
};

struct GmmFitOptions {
  int max_iterations = 200;
  double tolerance = 1e-6;  // relative log-likelihood improvement
  double covariance_regularization = 1e-6;
};

struct GmmFit {
  GmmModel model;
  // Mean per-sample log-likelihood of the data under the parameters at each
  // E-step; the last entry belongs to the returned model.
  std::vector<double> log_likelihood_trace;
  int iterations = 0;
  bool converged = false;
  // True when the last M-step lowered the likelihood and was discarded.
  bool rejected_final_step = false;
};

// EM from k-means++-seeded means, shared initial covariance (sample covariance
// + reg·I), and uniform weights. Every M-step adds reg·I to each covariance.
// Stops when the relative improvement of the mean log-likelihood is at most
// `tolerance`; a final step that lowers it is discarded.
GmmFit fit_gmm(const FeatureMatrix& features, int components, std::uint64_t seed, const GmmFitOptions& options = {});

// Anomaly score −log p(x).
double gmm_score(const GmmModel& model, std::span<const double> x);

}  // namespace vad
