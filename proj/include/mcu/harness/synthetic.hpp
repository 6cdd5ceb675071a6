#ifndef MCU_HARNESS_SYNTHETIC_HPP
#define MCU_HARNESS_SYNTHETIC_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mcu/types.hpp"

namespace mcu::harness {

/// One generated scenario: the dataset, the erased row indices, the model
/// the scenario is built for, and a JSON blob of analytic reference values
/// (ground-truth coefficients, target posterior centers, ...) consumed by
/// demos and tests.
struct SyntheticData {
  LabeledDataset data;
  std::vector<std::size_t> erased_indices;
  ModelSpec model;
  std::string info_json;
};

// Recognized kinds:
//   linreg-appendix   50-point degree-4 polynomial regression, noise
//                     variance 0.01, prior N(0,4); the 15 erased rows are
//                     the cluster with the smallest x values.
//   binclass-sec71    50-point scalar binary classification with a
//                     degree-4 logistic model, prior N(0,5); the erased
//                     rows are a cluster of 8 anomalous points at high x.
//   two-gaussian-fig2 10-point conjugate linear regression engineered so
//                     the posterior given D is an isotropic Gaussian at
//                     (2,4) and the posterior given D_r one at (1,1).
//   impsamp-fig1      20000 draws from q = N(1, 1.5^2) to be reweighted
//                     toward p = N(0,1); labels unused (regression task).
// Unknown kind -> InvalidArgumentError. Identical seeds give identical
// bytes.
SyntheticData generate_synthetic(const std::string& kind, std::uint64_t seed);

/// Corrupt-dataset construction: picks a random anchor row, takes its k
/// nearest neighbors by Euclidean feature distance (anchor included, ties
/// broken by row index), and flips their labels y -> 1-y. Returns the
/// corrupted dataset (row order unchanged) and the sorted flipped indices.
/// k >= |clean| -> InvalidArgumentError. Applying the same call twice with
/// the same seed restores the clean dataset.
std::pair<LabeledDataset, std::vector<std::size_t>> make_corrupt_dataset(
    const LabeledDataset& clean, std::size_t k, std::uint64_t seed);

}  // namespace mcu::harness

#endif
