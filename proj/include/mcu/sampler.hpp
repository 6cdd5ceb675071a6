#ifndef MCU_SAMPLER_HPP
#define MCU_SAMPLER_HPP

#include <cstdint>
#include <optional>

#include "mcu/candidate_set.hpp"
#include "mcu/types.hpp"

namespace mcu {

enum class SamplerInit { MapEstimate, Zeros, Explicit };

struct SamplerConfig {
  std::uint64_t num_samples = 1000;       // M, retained after burn-in
  std::optional<std::uint64_t> burn_in;   // default: num_samples / 10
  double proposal_step = 0.05;            // isotropic Gaussian random-walk sd
  double alpha = 1.0;                     // flattening scale, (0, 1]
  std::uint64_t seed = 0;
  SamplerInit init = SamplerInit::MapEstimate;
  ParameterVector init_value;             // used when init == Explicit
  bool adapt_step = false;                // burn-in only, 0.25 target rate

  std::uint64_t resolved_burn_in() const {
    return burn_in ? *burn_in : num_samples / 10;
  }
  void validate() const;  // InvalidArgumentError on bad ranges
};

/// Metropolis-Hastings acceptance ratio for the flattened target:
/// exp(alpha * (h_proposed - h_current)), evaluated in log space.
/// h values may be -infinity (impossible states -> ratio 0).
double acceptance_ratio(double h_proposed, double h_current, double alpha);

/// Random-walk Metropolis-Hastings chain targeting
/// (p(theta) p(D|theta))^alpha. Returns M retained post-burn-in samples;
/// rejected proposals repeat the previous sample as a distinct record.
/// Every retained record stores the un-tempered h(theta) = log_joint at
/// alpha = 1 (the tempered value is alpha * h). Identical (spec, data,
/// config) produce bit-identical output.
CandidateSet sample_posterior(const ModelSpec& spec, const LabeledDataset& data,
                              const SamplerConfig& config);

/// Canonical text form of (spec, config) hashed into the provenance.
std::string canonical_config_text(const ModelSpec& spec,
                                  const SamplerConfig& config);

}  // namespace mcu

#endif
