#include "mcu/candidate_set.hpp"

#include <cmath>
#include <string>

#include "mcu/errors.hpp"

namespace mcu {

void CandidateSet::validate() const {
  if (candidates.empty()) {
    throw CorruptionError("candidate set must contain at least one sample");
  }
  if (candidates.size() != h_values.size()) {
    throw CorruptionError("candidate/h count mismatch: " +
                          std::to_string(candidates.size()) + " vs " +
                          std::to_string(h_values.size()));
  }
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw CorruptionError("alpha must be in (0, 1], got " +
                          std::to_string(alpha));
  }
  const std::size_t d = candidates.front().dim();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].dim() != d) {
      throw CorruptionError("candidate " + std::to_string(i) +
                            " has inconsistent dimension");
    }
    if (!candidates[i].all_finite()) {
      throw CorruptionError("candidate " + std::to_string(i) +
                            " has a non-finite entry");
    }
    if (!std::isfinite(h_values[i])) {
      throw CorruptionError("h value " + std::to_string(i) + " is not finite");
    }
  }
}

CandidateSet concat(const std::vector<CandidateSet>& sets) {
  if (sets.empty()) {
    throw InvalidArgumentError("concat requires at least one candidate set");
  }
  CandidateSet out = sets.front();
  for (std::size_t i = 1; i < sets.size(); ++i) {
    const CandidateSet& s = sets[i];
    if (!(s.spec == out.spec) || s.alpha != out.alpha) {
      throw InvalidArgumentError(
          "concat: candidate sets target different distributions");
    }
    if (s.provenance.dataset_digest != out.provenance.dataset_digest) {
      throw InvalidArgumentError(
          "concat: candidate sets were built from different datasets");
    }
    if (s.dim() != out.dim()) {
      throw InvalidArgumentError("concat: dimension mismatch");
    }
    out.candidates.insert(out.candidates.end(), s.candidates.begin(),
                          s.candidates.end());
    out.h_values.insert(out.h_values.end(), s.h_values.begin(),
                        s.h_values.end());
    out.provenance.source_seeds.insert(out.provenance.source_seeds.end(),
                                       s.provenance.source_seeds.begin(),
                                       s.provenance.source_seeds.end());
  }
  out.validate();
  return out;
}

}  // namespace mcu
