#include "mcu/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mcu/errors.hpp"

namespace mcu {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_theta_dim(const ModelSpec& spec, const ParameterVector& theta,
                     std::size_t feature_dim) {
  if (theta.dim() != spec.parameter_dim(feature_dim)) {
    throw InvalidArgumentError(
        "theta has dim " + std::to_string(theta.dim()) + ", model expects " +
        std::to_string(spec.parameter_dim(feature_dim)));
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

double softplus(double t) {
  // log(1 + e^t) = max(t, 0) + log1p(e^{-|t|})
  return std::fmax(t, 0.0) + std::log1p(std::exp(-std::fabs(t)));
}

double sigmoid(double z) {
  double p;
  if (z >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    p = e / (1.0 + e);
  }
  // Keep the output strictly inside (0,1); beyond |z| ~ 37 the true value
  // rounds to an endpoint in double precision.
  if (p >= 1.0) p = std::nextafter(1.0, 0.0);
  if (p <= 0.0) p = std::nextafter(0.0, 1.0);
  return p;
}

double log_prior(const ModelSpec& spec, const ParameterVector& theta) {
  if (!(spec.prior_variance > 0.0)) {
    throw InvalidArgumentError("prior_variance must be positive");
  }
  const double v = spec.prior_variance;
  const double m = spec.prior_mean;
  const double norm = -0.5 * std::log(kTwoPi * v);
  double sum = 0.0;
  for (double t : theta.values) {
    const double d = t - m;
    sum += norm - d * d / (2.0 * v);
  }
  return sum;
}

double log_likelihood(const ModelSpec& spec, const ParameterVector& theta,
                      const LabeledDataset& data) {
  if (data.empty()) return 0.0;
  check_theta_dim(spec, theta, data.feature_dim);

  std::vector<double> phi;
  double sum = 0.0;
  if (spec.family == Family::LogisticRegression) {
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
      const auto& row = data.rows[i];
      if (row.features.size() != data.feature_dim) {
        throw InvalidArgumentError("row " + std::to_string(i) +
                                   " feature dim mismatch");
      }
      const double y = row.label;
      if (y != 0.0 && y != 1.0) {
        throw DataError("row " + std::to_string(i) + " has label " +
                        format_double(y) + ", logistic likelihood needs {0,1}");
      }
      expand_features(spec, row.features, phi);
      const double z = dot(theta.values, phi);
      // y=1: log sigma(z) = -softplus(-z);  y=0: log(1-sigma(z)) = -softplus(z)
      sum += (y == 1.0) ? -softplus(-z) : -softplus(z);
    }
  } else {
    if (!(spec.noise_variance > 0.0)) {
      throw InvalidArgumentError("noise_variance must be positive");
    }
    const double nv = spec.noise_variance;
    const double norm = -0.5 * std::log(kTwoPi * nv);
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
      const auto& row = data.rows[i];
      if (row.features.size() != data.feature_dim) {
        throw InvalidArgumentError("row " + std::to_string(i) +
                                   " feature dim mismatch");
      }
      expand_features(spec, row.features, phi);
      const double r = row.label - dot(theta.values, phi);
      sum += norm - r * r / (2.0 * nv);
    }
  }
  return sum;
}

double log_joint(const ModelSpec& spec, const ParameterVector& theta,
                 const LabeledDataset& data) {
  return log_likelihood(spec, theta, data) + log_prior(spec, theta);
}

double predict(const ModelSpec& spec, const ParameterVector& theta,
               std::span<const double> x) {
  check_theta_dim(spec, theta, x.size());
  std::vector<double> phi;
  expand_features(spec, x, phi);
  const double z = dot(theta.values, phi);
  if (spec.family == Family::LogisticRegression) return sigmoid(z);
  return z;
}

ParameterVector grad_log_joint(const ModelSpec& spec,
                               const ParameterVector& theta,
                               const LabeledDataset& data) {
  if (!data.empty()) check_theta_dim(spec, theta, data.feature_dim);
  const std::size_t dim = theta.dim();
  ParameterVector grad;
  grad.values.assign(dim, 0.0);

  std::vector<double> phi;
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    const auto& row = data.rows[i];
    expand_features(spec, row.features, phi);
    const double z = dot(theta.values, phi);
    double coeff;
    if (spec.family == Family::LogisticRegression) {
      const double y = row.label;
      if (y != 0.0 && y != 1.0) {
        throw DataError("row " + std::to_string(i) + " has label " +
                        format_double(y) + ", logistic likelihood needs {0,1}");
      }
      coeff = y - sigmoid(z);
    } else {
      coeff = (row.label - z) / spec.noise_variance;
    }
    for (std::size_t j = 0; j < dim; ++j) grad.values[j] += coeff * phi[j];
  }
  for (std::size_t j = 0; j < dim; ++j) {
    grad.values[j] -= (theta.values[j] - spec.prior_mean) / spec.prior_variance;
  }
  return grad;
}

std::vector<double> neg_log_joint_hessian(const ModelSpec& spec,
                                          const ParameterVector& theta,
                                          const LabeledDataset& data) {
  if (!data.empty()) check_theta_dim(spec, theta, data.feature_dim);
  const std::size_t dim = theta.dim();
  std::vector<double> hess(dim * dim, 0.0);

  std::vector<double> phi;
  for (const auto& row : data.rows) {
    expand_features(spec, row.features, phi);
    double coeff;
    if (spec.family == Family::LogisticRegression) {
      const double p = sigmoid(dot(theta.values, phi));
      coeff = p * (1.0 - p);
    } else {
      coeff = 1.0 / spec.noise_variance;
    }
    for (std::size_t a = 0; a < dim; ++a) {
      for (std::size_t b = 0; b < dim; ++b) {
        hess[a * dim + b] += coeff * phi[a] * phi[b];
      }
    }
  }
  for (std::size_t a = 0; a < dim; ++a) {
    hess[a * dim + a] += 1.0 / spec.prior_variance;
  }
  return hess;
}

}  // namespace mcu
