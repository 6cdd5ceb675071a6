#ifndef MCU_MODEL_HPP
#define MCU_MODEL_HPP

#include <span>

#include "mcu/types.hpp"

namespace mcu {

/// Sum of independent Gaussian log-densities of theta under the prior.
double log_prior(const ModelSpec& spec, const ParameterVector& theta);

/// Sum over rows (in ascending row-index order) of the per-datum
/// log-likelihood. Empty datasets contribute 0. The logistic case uses the
/// log-sum-exp form of log-sigmoid; |logit| beyond 700 stays finite.
double log_likelihood(const ModelSpec& spec, const ParameterVector& theta,
                      const LabeledDataset& data);

/// h(theta) = log_likelihood + log_prior, composed the same way every call
/// so persisted values replay exactly.
double log_joint(const ModelSpec& spec, const ParameterVector& theta,
                 const LabeledDataset& data);

/// P(y=1 | x) for logistic models (strictly inside (0,1) for finite
/// logits) or the predictive mean for regression.
double predict(const ModelSpec& spec, const ParameterVector& theta,
               std::span<const double> x);

/// Analytic gradient of log_joint with respect to theta.
ParameterVector grad_log_joint(const ModelSpec& spec,
                               const ParameterVector& theta,
                               const LabeledDataset& data);

/// Negative log-joint Hessian at theta, row-major dim x dim. Closed form
/// for both families (needed by the influence baseline).
std::vector<double> neg_log_joint_hessian(const ModelSpec& spec,
                                          const ParameterVector& theta,
                                          const LabeledDataset& data);

/// log(1 + exp(t)) without overflow.
double softplus(double t);

/// Logistic sigmoid clamped to the open interval (0, 1).
double sigmoid(double z);

}  // namespace mcu

#endif
