#ifndef MCU_BASELINES_HPP
#define MCU_BASELINES_HPP

#include <cstdint>
#include <span>

#include "mcu/types.hpp"

namespace mcu {

struct OptimizerConfig {
  std::uint64_t max_iters = 200000;
  // train_map/retrain: multiplier on the curvature-derived trial step.
  // naive_unlearn: the raw gradient step size.
  double learning_rate = 1.0;
  double grad_tolerance = 1e-6;   // infinity norm
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainResult {
  ParameterVector theta;
  bool converged = false;
  std::uint64_t iterations = 0;
  double grad_inf_norm = 0.0;
};

/// MAP estimate by deterministic full-batch gradient ascent on the
/// log-joint with backtracking (Armijo) line search. Converged when the
/// gradient infinity norm drops to grad_tolerance; otherwise returns the
/// final iterate with converged = false. Non-finite objective ->
/// DivergenceError.
TrainResult train_map(const ModelSpec& spec, const LabeledDataset& data,
                      const OptimizerConfig& cfg);

/// Reference model: train_map on D minus the erased rows. Erasing the full
/// dataset (or an invalid index) -> InvalidArgumentError. An empty erased
/// list reproduces train_map(D) bit-for-bit.
TrainResult retrain(const ModelSpec& spec, const LabeledDataset& data,
                    std::span<const std::size_t> erased_indices,
                    const OptimizerConfig& cfg);

/// The catastrophic unlearner of the pitfall demo: exactly `iters`
/// gradient steps descending log_joint(theta, D_e) from theta_start, each
/// step backtracked so the objective never increases. Non-finite iterate ->
/// DivergenceError carrying the last finite iterate.
ParameterVector naive_unlearn(const ModelSpec& spec,
                              const ParameterVector& theta_start,
                              const LabeledDataset& erased,
                              std::uint64_t iters, const OptimizerConfig& cfg);

/// One-step influence-function unlearner (generic stand-in for BIF; reads
/// the remaining data, unlike the candidate-set path):
///   theta' = theta_map - H_r^{-1} * sum_{e in D_e} grad log p(e|theta_map)
/// where H_r is the negative log-joint Hessian on D \ D_e at theta_map —
/// a single Newton step toward the D_r mode, exact for quadratic
/// objectives. Indefinite or singular H_r -> NumericalError naming the
/// offending eigenvalue.
ParameterVector influence_unlearn(const ModelSpec& spec,
                                  const ParameterVector& theta_map,
                                  const LabeledDataset& data,
                                  std::span<const std::size_t> erased_indices);

}  // namespace mcu

#endif
