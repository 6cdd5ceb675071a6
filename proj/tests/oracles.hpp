// Test-only reference implementations, independent of the library code
// paths they check: closed-form conjugate posteriors, extended-precision
// density sums, finite differences, and Monte-Carlo error estimators.
#ifndef MCU_TESTS_ORACLES_HPP
#define MCU_TESTS_ORACLES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "mcu/types.hpp"

namespace oracles {

// Design matrix of expanded features, one row per datum.
inline Eigen::MatrixXd design_matrix(const mcu::ModelSpec& spec,
                                     const mcu::LabeledDataset& data) {
  std::vector<double> phi;
  const std::size_t dim = spec.parameter_dim(data.feature_dim);
  Eigen::MatrixXd x(data.size(), dim);
  for (std::size_t i = 0; i < data.size(); ++i) {
    mcu::expand_features(spec, data.rows[i].features, phi);
    for (std::size_t j = 0; j < dim; ++j) x(i, j) = phi[j];
  }
  return x;
}

struct GaussianPosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

// Closed-form posterior of Bayesian linear regression with an isotropic
// Gaussian prior: precision A = X^T X / nv + I / pv, mean A^{ -1} (X^T y /
// nv + m / pv).
inline GaussianPosterior conjugate_posterior(const mcu::ModelSpec& spec,
                                             const mcu::LabeledDataset& data) {
  const Eigen::MatrixXd x = design_matrix(spec, data);
  Eigen::VectorXd y(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) y(i) = data.rows[i].label;
  const std::size_t dim = spec.parameter_dim(data.feature_dim);
  const Eigen::MatrixXd a =
      x.transpose() * x / spec.noise_variance +
      Eigen::MatrixXd::Identity(dim, dim) / spec.prior_variance;
  const Eigen::VectorXd b =
      x.transpose() * y / spec.noise_variance +
      Eigen::VectorXd::Constant(dim, spec.prior_mean / spec.prior_variance);
  GaussianPosterior p;
  p.covariance = a.inverse();
  p.mean = a.ldlt().solve(b);
  return p;
}

// Extended-precision sum of independent Gaussian log densities.
inline long double gaussian_log_density_sum(const std::vector<double>& values,
                                            long double mean,
                                            long double variance) {
  const long double pi = 3.14159265358979323846264338327950288L;
  long double sum = 0.0L;
  for (double v : values) {
    const long double d = static_cast<long double>(v) - mean;
    sum += -0.5L * std::log(2.0L * pi * variance) - d * d / (2.0L * variance);
  }
  return sum;
}

// Naive logistic log-likelihood: p = e^z / (1 + e^z) evaluated literally in
// extended precision, usable where e^z is representable.
inline long double naive_logistic_log_likelihood(
    const mcu::ModelSpec& spec, const mcu::ParameterVector& theta,
    const mcu::LabeledDataset& data) {
  std::vector<double> phi;
  long double sum = 0.0L;
  for (const auto& row : data.rows) {
    mcu::expand_features(spec, row.features, phi);
    long double z = 0.0L;
    for (std::size_t j = 0; j < phi.size(); ++j) {
      z += static_cast<long double>(theta.values[j]) * phi[j];
    }
    const long double p = std::exp(z) / (1.0L + std::exp(z));
    sum += row.label == 1.0 ? std::log(p) : std::log(1.0L - p);
  }
  return sum;
}

// Central finite differences of any scalar function of theta.
template <typename F>
std::vector<double> finite_difference_gradient(F&& f,
                                               const mcu::ParameterVector& theta,
                                               double h = 1e-5) {
  std::vector<double> grad(theta.dim());
  mcu::ParameterVector t = theta;
  for (std::size_t j = 0; j < theta.dim(); ++j) {
    const double saved = t.values[j];
    t.values[j] = saved + h;
    const double fp = f(t);
    t.values[j] = saved - h;
    const double fm = f(t);
    t.values[j] = saved;
    grad[j] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

// Batch-means standard error for an autocorrelated chain coordinate.
inline double batch_means_se(const std::vector<double>& chain,
                             std::size_t n_batches = 50) {
  const std::size_t batch = chain.size() / n_batches;
  std::vector<double> means;
  for (std::size_t b = 0; b < n_batches; ++b) {
    double s = 0.0;
    for (std::size_t i = b * batch; i < (b + 1) * batch; ++i) s += chain[i];
    means.push_back(s / static_cast<double>(batch));
  }
  const double m = mean(means);
  double s = 0.0;
  for (double x : means) s += (x - m) * (x - m);
  s /= static_cast<double>(n_batches - 1);
  return std::sqrt(s / static_cast<double>(n_batches));
}

// Leave-one-block-out jackknife SE of a weighted mean coordinate. Handles
// both importance-weight dispersion and within-chain autocorrelation when
// blocks align with chain segments.
inline double weighted_jackknife_se(const std::vector<double>& coord,
                                    const std::vector<double>& weights,
                                    std::size_t n_blocks) {
  const std::size_t n = coord.size();
  const std::size_t block = n / n_blocks;
  std::vector<double> reps;
  double wsum_all = 0.0, wx_all = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    wsum_all += weights[i];
    wx_all += weights[i] * coord[i];
  }
  for (std::size_t b = 0; b < n_blocks; ++b) {
    double wsum = wsum_all, wx = wx_all;
    for (std::size_t i = b * block; i < (b + 1) * block; ++i) {
      wsum -= weights[i];
      wx -= weights[i] * coord[i];
    }
    reps.push_back(wx / wsum);
  }
  const double m = mean(reps);
  double s = 0.0;
  for (double r : reps) s += (r - m) * (r - m);
  s *= static_cast<double>(n_blocks - 1) / static_cast<double>(n_blocks);
  return std::sqrt(s);
}

}  // namespace oracles

#endif
