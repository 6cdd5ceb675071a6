#ifndef MCU_EXPLAIN_HPP
#define MCU_EXPLAIN_HPP

#include <string>
#include <utility>
#include <vector>

#include "mcu/candidate_set.hpp"
#include "mcu/types.hpp"

namespace mcu {

enum class Estimator { MapCandidate, WeightedMean };

/// Accuracy shift caused by unlearning each subset, sorted by descending
/// delta (ties broken by subset_id). Positive delta flags a subset whose
/// removal improves the model — the suspect-data signal.
struct SubsetInfluenceReport {
  struct Entry {
    std::string subset_id;
    std::size_t subset_size = 0;
    double accuracy_before = 0.0;
    double accuracy_after = 0.0;
    double delta = 0.0;  // accuracy_after - accuracy_before
    double ess = 0.0;
  };
  std::vector<Entry> entries;
  std::string eval_set_id;
  Estimator estimator = Estimator::WeightedMean;
  // Quartiles of the delta distribution, for boxplot-style context.
  double delta_q1 = 0.0;
  double delta_median = 0.0;
  double delta_q3 = 0.0;
};

/// Unlearns each subset from the candidate set and measures the accuracy
/// change on eval_data. accuracy_before comes from the chosen estimator
/// with nothing erased. Subsets may overlap (caller's responsibility).
/// Empty subset list -> InvalidArgumentError.
SubsetInfluenceReport subset_influence(
    const CandidateSet& set,
    const std::vector<std::pair<std::string, LabeledDataset>>& subsets,
    const LabeledDataset& eval_data, Estimator estimator,
    const std::string& eval_set_id = "eval");

std::string report_to_json(const SubsetInfluenceReport& report);
std::string report_to_csv(const SubsetInfluenceReport& report);

std::string estimator_name(Estimator e);
Estimator estimator_from_name(const std::string& s);

}  // namespace mcu

#endif
