#include "mcu/baselines.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "mcu/errors.hpp"
#include "mcu/model.hpp"

namespace mcu {

void OptimizerConfig::validate() const {
  if (max_iters < 1) throw InvalidArgumentError("max_iters must be >= 1");
  if (!(learning_rate > 0.0)) {
    throw InvalidArgumentError("learning_rate must be positive");
  }
  if (!(grad_tolerance > 0.0)) {
    throw InvalidArgumentError("grad_tolerance must be positive");
  }
}

namespace {

double inf_norm(const ParameterVector& v) {
  double m = 0.0;
  for (double x : v.values) m = std::fmax(m, std::fabs(x));
  return m;
}

double dot_self(const ParameterVector& v) {
  double s = 0.0;
  for (double x : v.values) s += x * x;
  return s;
}

}  // namespace

TrainResult train_map(const ModelSpec& spec, const LabeledDataset& data,
                      const OptimizerConfig& cfg) {
  cfg.validate();
  if (data.empty()) throw InvalidArgumentError("train_map requires data");
  spec.validate(data.feature_dim);

  const std::size_t dim = spec.parameter_dim(data.feature_dim);
  ParameterVector theta(std::vector<double>(dim, 0.0));
  double f = log_joint(spec, theta, data);
  if (!std::isfinite(f)) {
    throw DivergenceError("log-joint not finite at the zero initializer",
                          theta.values);
  }

  // A strong sufficient-decrease constant keeps the warm-started step away
  // from the 2/L stability boundary, where ascent progress stalls.
  constexpr double kArmijo = 0.25;
  TrainResult result;
  ParameterVector trial(std::vector<double>(dim, 0.0));

  for (std::uint64_t it = 0; it < cfg.max_iters; ++it) {
    const ParameterVector grad = grad_log_joint(spec, theta, data);
    const double gnorm = inf_norm(grad);
    result.iterations = it;
    result.grad_inf_norm = gnorm;
    if (gnorm <= cfg.grad_tolerance) {
      result.converged = true;
      break;
    }
    const double gsq = dot_self(grad);

    // Steepest ascent with the exact line-search step of the local
    // quadratic model, s = g'g / g'Hg (both families are log-concave, so
    // the analytic Hessian is available and positive definite). Armijo
    // backtracking guards the non-quadratic regime.
    const std::vector<double> hess = neg_log_joint_hessian(spec, theta, data);
    double ghg = 0.0;
    for (std::size_t a = 0; a < dim; ++a) {
      for (std::size_t b = 0; b < dim; ++b) {
        ghg += grad.values[a] * hess[a * dim + b] * grad.values[b];
      }
    }
    double step = cfg.learning_rate * (ghg > 0.0 ? gsq / ghg : 1.0);
    const double curvature_step = step;
    // Below this improvement the objective's rounding granularity hides
    // real ascent; curvature-sized steps are then accepted on gradient
    // information alone so the gradient norm can still be polished.
    const double noise =
        16.0 * 2.220446049250313e-16 * std::fmax(std::fabs(f), 1.0);
    bool moved = false;
    while (step > 1e-20) {
      for (std::size_t j = 0; j < dim; ++j) {
        trial.values[j] = theta.values[j] + step * grad.values[j];
      }
      const double ft = log_joint(spec, trial, data);
      const bool armijo = std::isfinite(ft) && ft >= f + kArmijo * step * gsq;
      const bool polish = std::isfinite(ft) && kArmijo * step * gsq <= noise &&
                          ft >= f - noise && step <= curvature_step;
      if (armijo || polish) {
        theta.values.swap(trial.values);
        f = ft;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;  // no ascent direction progress possible
  }

  if (!std::isfinite(f)) {
    throw DivergenceError("objective became non-finite during training",
                          theta.values);
  }
  result.theta = std::move(theta);
  if (!result.converged) {
    const ParameterVector grad = grad_log_joint(spec, result.theta, data);
    result.grad_inf_norm = inf_norm(grad);
    result.converged = result.grad_inf_norm <= cfg.grad_tolerance;
  }
  return result;
}

TrainResult retrain(const ModelSpec& spec, const LabeledDataset& data,
                    std::span<const std::size_t> erased_indices,
                    const OptimizerConfig& cfg) {
  const LabeledDataset remaining = data.without(erased_indices);
  if (remaining.empty()) {
    throw InvalidArgumentError("cannot retrain: erased set covers all rows");
  }
  return train_map(spec, remaining, cfg);
}

ParameterVector naive_unlearn(const ModelSpec& spec,
                              const ParameterVector& theta_start,
                              const LabeledDataset& erased,
                              std::uint64_t iters, const OptimizerConfig& cfg) {
  cfg.validate();
  if (!theta_start.all_finite()) {
    throw InvalidArgumentError("theta_start must be finite");
  }
  ParameterVector theta = theta_start;
  double f = log_joint(spec, theta, erased);
  const std::size_t dim = theta.dim();
  ParameterVector trial(std::vector<double>(dim, 0.0));

  for (std::uint64_t it = 0; it < iters; ++it) {
    const ParameterVector grad = grad_log_joint(spec, theta, erased);
    if (!grad.all_finite()) {
      throw DivergenceError("gradient became non-finite at iteration " +
                                std::to_string(it),
                            theta.values);
    }
    // Descend the erased-data log joint; halve the step on an increase so
    // the objective trace is non-increasing.
    double step = cfg.learning_rate;
    double ft = f;
    while (true) {
      for (std::size_t j = 0; j < dim; ++j) {
        trial.values[j] = theta.values[j] - step * grad.values[j];
      }
      ft = log_joint(spec, trial, erased);
      if (std::isfinite(ft) && ft <= f) break;
      step *= 0.5;
      if (step < 1e-300) {
        trial = theta;  // stationary: take a null step
        ft = f;
        break;
      }
    }
    theta.values.swap(trial.values);
    f = ft;
    if (!theta.all_finite()) {
      throw DivergenceError("iterate became non-finite at iteration " +
                                std::to_string(it),
                            trial.values);
    }
  }
  return theta;
}

ParameterVector influence_unlearn(const ModelSpec& spec,
                                  const ParameterVector& theta_map,
                                  const LabeledDataset& data,
                                  std::span<const std::size_t> erased_indices) {
  if (erased_indices.empty()) return theta_map;
  const LabeledDataset erased = data.subset(erased_indices);
  const LabeledDataset remaining = data.without(erased_indices);
  const std::size_t dim = theta_map.dim();

  // Likelihood-only gradient over the erased rows: grad_log_joint minus
  // the prior term it includes.
  ParameterVector s = grad_log_joint(spec, theta_map, erased);
  for (std::size_t j = 0; j < dim; ++j) {
    s.values[j] += (theta_map.values[j] - spec.prior_mean) / spec.prior_variance;
  }

  const std::vector<double> hess =
      neg_log_joint_hessian(spec, theta_map, remaining);
  Eigen::MatrixXd h(dim, dim);
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = 0; b < dim; ++b) h(a, b) = hess[a * dim + b];
  }
  Eigen::VectorXd rhs(dim);
  for (std::size_t j = 0; j < dim; ++j) rhs(j) = s.values[j];

  Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0.0) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    const double lam = eig.eigenvalues().minCoeff();
    throw NumericalError(
        "influence Hessian is not positive definite: smallest eigenvalue " +
        format_double(lam) + (lam == 0.0 ? " (singular)" : " (wrong sign)"));
  }
  const Eigen::VectorXd delta = ldlt.solve(rhs);

  ParameterVector out = theta_map;
  for (std::size_t j = 0; j < dim; ++j) out.values[j] -= delta(j);
  return out;
}

}  // namespace mcu
