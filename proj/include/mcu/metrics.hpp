#ifndef MCU_METRICS_HPP
#define MCU_METRICS_HPP

#include "mcu/types.hpp"

namespace mcu {

/// Fraction of rows where (predict >= 0.5) matches the label. Ties at
/// probability 0.5 classify as 1. Classification data only; regression ->
/// InvalidArgumentError (use mean_squared_error). Empty data ->
/// InvalidArgumentError.
double evaluate_accuracy(const ModelSpec& spec, const ParameterVector& theta,
                         const LabeledDataset& data);

/// Mean squared prediction error, the regression counterpart.
double mean_squared_error(const ModelSpec& spec, const ParameterVector& theta,
                          const LabeledDataset& data);

}  // namespace mcu

#endif
