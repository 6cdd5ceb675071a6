#ifndef MCU_CANDIDATE_SET_HPP
#define MCU_CANDIDATE_SET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mcu/types.hpp"

namespace mcu {

/// Where a candidate set came from: enough to detect mismatched unlearn
/// requests (dataset digest) and to replay the chain (seed + config digest).
struct Provenance {
  std::uint64_t seed = 0;
  std::uint64_t created_at_unix = 0;  // seconds; the only non-deterministic field
  std::string config_digest;          // sha256 of the canonical config text
  std::string dataset_digest;         // sha256 of canonical_csv(D)
  std::vector<std::uint64_t> source_seeds;  // one per concatenated chain
};

/// MCMC samples theta_1..theta_M from the (possibly flattened) posterior,
/// each with its un-tempered log-joint h(theta_i). Pre-computed once;
/// every later unlearn request reads only this set plus the erased rows.
struct CandidateSet {
  std::vector<ParameterVector> candidates;
  std::vector<double> h_values;
  double alpha = 1.0;
  ModelSpec spec;
  Provenance provenance;

  std::size_t size() const { return candidates.size(); }
  std::size_t dim() const {
    return candidates.empty() ? 0 : candidates.front().dim();
  }

  /// Throws CorruptionError if |candidates| != |h_values|, M < 1, any h is
  /// non-finite, alpha is outside (0,1], or candidate dims disagree.
  void validate() const;
};

/// Explicit concatenation of chains run with distinct seeds against the
/// same spec/alpha/dataset. Records each source seed in the provenance.
/// Throws InvalidArgumentError on spec/alpha/dataset-digest mismatch.
CandidateSet concat(const std::vector<CandidateSet>& sets);

}  // namespace mcu

#endif
