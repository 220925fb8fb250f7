#include "vad/gmm.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "vad/error.hpp"
#include "vad/kmeans.hpp"

namespace vad {
namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double log_sum_exp(const Eigen::Ref<const Eigen::RowVectorXd>& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

}  // namespace

GmmModel::GmmModel(std::vector<double> weights, std::vector<Eigen::VectorXd> means,
                   std::vector<Eigen::MatrixXd> covariances)
    : weights_(std::move(weights)), means_(std::move(means)), covariances_(std::move(covariances)) {
  const std::size_t n = weights_.size();
  if (n == 0 || means_.size() != n || covariances_.size() != n) {
    throw std::invalid_argument("GmmModel: weights, means, and covariances must have the same nonzero count");
  }
  const auto d = means_.front().size();
  if (d == 0) throw std::invalid_argument("GmmModel: zero-dimensional component");
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (means_[j].size() != d || covariances_[j].rows() != d || covariances_[j].cols() != d) {
      throw std::invalid_argument("GmmModel: inconsistent component dimensions");
    }
    if (!(weights_[j] >= 0.0)) throw std::invalid_argument("GmmModel: negative weight");
    total += weights_[j];
    Eigen::LLT<Eigen::MatrixXd> llt(covariances_[j]);
    if (llt.info() != Eigen::Success) {
      throw NumericError("GmmModel: covariance of component " + std::to_string(j) + " is not positive definite");
    }
    Eigen::MatrixXd lower = llt.matrixL();
    log_det_.push_back(2.0 * lower.diagonal().array().log().sum());
    chol_lower_.push_back(std::move(lower));
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("GmmModel: weights must sum to 1");
}

double GmmModel::component_log_density(std::size_t j, std::span<const double> x) const {
  Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::VectorXd z = chol_lower_[j].triangularView<Eigen::Lower>().solve(v - means_[j]);
  return -0.5 * (static_cast<double>(x.size()) * kLog2Pi + log_det_[j] + z.squaredNorm());
}

double GmmModel::log_density(std::span<const double> x) const {
  if (x.size() != dim()) {
    throw CompatibilityError("gmm: query has dimension " + std::to_string(x.size()) + ", model has " +
                             std::to_string(dim()));
  }
  Eigen::RowVectorXd terms(static_cast<Eigen::Index>(components()));
  for (std::size_t j = 0; j < components(); ++j) {
    terms(static_cast<Eigen::Index>(j)) = std::log(weights_[j]) + component_log_density(j, x);
  }
  return log_sum_exp(terms);
}

double gmm_score(const GmmModel& model, std::span<const double> x) { return -model.log_density(x); }

GmmFit fit_gmm(const FeatureMatrix& features, int components, std::uint64_t seed, const GmmFitOptions& options) {
  if (components < 1) throw ValidationError("fit_gmm: need at least one component");
  const auto n_points = static_cast<Eigen::Index>(features.rows());
  const auto dim = static_cast<Eigen::Index>(features.cols());
  if (n_points < components) {
    throw ValidationError("fit_gmm: " + std::to_string(n_points) + " samples cannot support " +
                          std::to_string(components) + " components");
  }
  if (dim == 0) throw ValidationError("fit_gmm: zero-dimensional features");
  for (double v : features.data())
    if (!std::isfinite(v)) throw ValidationError("fit_gmm: non-finite feature value");

  const Eigen::Map<const RowMatrix> X(features.data().data(), n_points, dim);
  const Eigen::MatrixXd reg = options.covariance_regularization * Eigen::MatrixXd::Identity(dim, dim);
  const auto k = static_cast<std::size_t>(components);

  std::mt19937_64 rng(seed);
  const auto seeds = kmeans_plus_plus(features, k, rng);
  const Eigen::RowVectorXd global_mean = X.colwise().mean();
  const Eigen::MatrixXd centered = X.rowwise() - global_mean;
  const Eigen::MatrixXd global_cov = (centered.transpose() * centered) / static_cast<double>(n_points) + reg;

  std::vector<double> weights(k, 1.0 / static_cast<double>(k));
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covs(k, global_cov);
  for (std::size_t s : seeds) means.emplace_back(X.row(static_cast<Eigen::Index>(s)).transpose());

  GmmFit fit;
  GmmModel model(weights, means, covs);
  Eigen::MatrixXd log_resp(n_points, static_cast<Eigen::Index>(k));
  GmmModel previous_model;
  double previous = -std::numeric_limits<double>::infinity();

  for (int it = 0;; ++it) {
    // E-step.
    for (std::size_t j = 0; j < k; ++j) {
      const double log_w = std::log(model.weights()[j]);
      for (Eigen::Index i = 0; i < n_points; ++i) {
        log_resp(i, static_cast<Eigen::Index>(j)) = log_w + model.component_log_density(j, features.row(i));
      }
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < n_points; ++i) {
      const double lse = log_sum_exp(log_resp.row(i));
      total += lse;
      log_resp.row(i).array() -= lse;
    }
    const double ll = total / static_cast<double>(n_points);
    if (ll < previous) {
      // The ridge makes the M-step an inexact maximizer, so a step that has
      // already converged can lose a little likelihood. Keep the better model.
      model = std::move(previous_model);
      fit.converged = true;
      fit.rejected_final_step = true;
      break;
    }
    fit.log_likelihood_trace.push_back(ll);
    fit.iterations = it;
    if (it > 0 && ll - previous <= options.tolerance * std::abs(previous)) {
      fit.converged = true;
      break;
    }
    if (it >= options.max_iterations) break;
    previous = ll;
    previous_model = model;

    // M-step.
    const Eigen::MatrixXd resp = log_resp.array().exp();
    Eigen::VectorXd nk = resp.colwise().sum().transpose();
    nk.array() += 10.0 * std::numeric_limits<double>::epsilon();
    const double nk_total = nk.sum();
    for (std::size_t j = 0; j < k; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      weights[j] = nk(jj) / nk_total;
      means[j] = (X.transpose() * resp.col(jj)) / nk(jj);
      const Eigen::MatrixXd diff = X.rowwise() - means[j].transpose();
      covs[j] = (diff.transpose() * diff.cwiseProduct(resp.col(jj).replicate(1, dim))) / nk(jj) + reg;
      covs[j] = 0.5 * (covs[j] + covs[j].transpose());
    }
    model = GmmModel(weights, means, covs);
  }
  fit.model = std::move(model);
  return fit;
}

}  // namespace vad
