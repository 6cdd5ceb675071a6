#ifndef MCU_UNLEARNER_HPP
#define MCU_UNLEARNER_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "mcu/candidate_set.hpp"
#include "mcu/types.hpp"

namespace mcu {

/// Output of one unlearn request. weights are normalized (sum 1);
/// map_index attains the maximum of g_values (ties -> lowest index);
/// ess = 1 / sum(weights^2), in [1, M].
struct UnlearnResult {
  std::vector<double> g_values;
  std::vector<double> weights;
  std::size_t map_index = 0;
  ParameterVector map_candidate;
  ParameterVector weighted_mean;
  double ess = 0.0;
  double alpha = 1.0;  // copied from the candidate set
};

/// g_i = h_i - log p(D_e | theta_i): the unnormalized log posterior on the
/// remaining data, computed without ever reading D_r. Consecutive duplicate
/// candidates (rejected proposals) share one likelihood evaluation.
std::vector<double> compute_g(const CandidateSet& set,
                              const LabeledDataset& erased);

/// Normalized importance weights proportional to exp(g_i - alpha * h_i),
/// computed in log space with max-subtraction. NaN input ->
/// InvalidArgumentError.
std::vector<double> compute_weights(const CandidateSet& set,
                                    const std::vector<double>& g_values);

/// Composes compute_g and compute_weights, then selects the MAP candidate
/// and the weighted-mean parameters. Emits a warn-level diagnostic (stderr)
/// when ess < 0.01 * M — the weight-degeneracy failure mode.
UnlearnResult unlearn(const CandidateSet& set, const LabeledDataset& erased);

/// JSON document for an UnlearnResult. When M exceeds
/// `array_elision_threshold` the per-candidate g/weight arrays are elided
/// and summary statistics retained; schema in docs/formats.md.
std::string unlearn_result_to_json(const UnlearnResult& result,
                                   std::size_t array_elision_threshold = 10000);

}  // namespace mcu

#endif
