#include "mcu/sampler.hpp"

#include <cmath>
#include <ctime>
#include <sstream>
#include <string>

#include "mcu/baselines.hpp"
#include "mcu/digest.hpp"
#include "mcu/errors.hpp"
#include "mcu/model.hpp"
#include "mcu/rng.hpp"

namespace mcu {

void SamplerConfig::validate() const {
  if (num_samples < 1) throw InvalidArgumentError("num_samples must be >= 1");
  if (!(proposal_step > 0.0)) {
    throw InvalidArgumentError("proposal_step must be positive");
  }
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw InvalidArgumentError("alpha must be in (0, 1]");
  }
  if (init == SamplerInit::Explicit && init_value.values.empty()) {
    throw InvalidArgumentError("explicit init requires an init_value");
  }
}

double acceptance_ratio(double h_proposed, double h_current, double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw InvalidArgumentError("alpha must be in (0, 1]");
  }
  if (std::isnan(h_proposed) || std::isnan(h_current)) {
    throw InvalidArgumentError("acceptance_ratio: NaN log-joint value");
  }
  if (std::isinf(h_proposed) && h_proposed < 0.0) return 0.0;
  return std::exp(alpha * (h_proposed - h_current));
}

std::string canonical_config_text(const ModelSpec& spec,
                                  const SamplerConfig& config) {
  std::ostringstream out;
  out << "family=" << family_name(spec.family)
      << ";feature_map=" << feature_map_name(spec.feature_map)
      << ";poly_degree=" << spec.poly_degree
      << ";prior_mean=" << format_double(spec.prior_mean)
      << ";prior_variance=" << format_double(spec.prior_variance)
      << ";noise_variance=" << format_double(spec.noise_variance)
      << ";num_samples=" << config.num_samples
      << ";burn_in=" << config.resolved_burn_in()
      << ";proposal_step=" << format_double(config.proposal_step)
      << ";alpha=" << format_double(config.alpha)
      << ";seed=" << config.seed << ";init=";
  switch (config.init) {
    case SamplerInit::MapEstimate: out << "map-estimate"; break;
    case SamplerInit::Zeros: out << "zeros"; break;
    case SamplerInit::Explicit:
      out << "explicit:";
      for (double v : config.init_value.values) out << format_double(v) << ",";
      break;
  }
  out << ";adapt_step=" << (config.adapt_step ? 1 : 0);
  return out.str();
}

namespace {

ParameterVector initial_point(const ModelSpec& spec, const LabeledDataset& data,
                              const SamplerConfig& config, std::size_t dim) {
  switch (config.init) {
    case SamplerInit::Explicit:
      if (config.init_value.dim() != dim) {
        throw InvalidArgumentError("init_value has dim " +
                                   std::to_string(config.init_value.dim()) +
                                   ", expected " + std::to_string(dim));
      }
      return config.init_value;
    case SamplerInit::Zeros:
      return ParameterVector(std::vector<double>(dim, 0.0));
    case SamplerInit::MapEstimate:
      if (data.empty()) return ParameterVector(std::vector<double>(dim, 0.0));
      try {
        OptimizerConfig opt;
        opt.seed = config.seed;
        return train_map(spec, data, opt).theta;
      } catch (const NumericalError&) {
        return ParameterVector(std::vector<double>(dim, 0.0));
      }
  }
  throw InvalidArgumentError("unknown sampler init");
}

}  // namespace

CandidateSet sample_posterior(const ModelSpec& spec, const LabeledDataset& data,
                              const SamplerConfig& config) {
  config.validate();
  spec.validate(data.empty() ? 1 : data.feature_dim);
  const std::size_t dim =
      spec.parameter_dim(data.empty() ? data.feature_dim : data.feature_dim);

  ParameterVector current = initial_point(spec, data, config, dim);
  double h_current = log_joint(spec, current, data);
  if (!std::isfinite(h_current)) {
    throw InitializationError("log-joint is not finite at the initial sample");
  }

  Rng rng(config.seed);
  const std::uint64_t burn = config.resolved_burn_in();
  const std::uint64_t total = burn + config.num_samples;
  double step = config.proposal_step;

  CandidateSet set;
  set.alpha = config.alpha;
  set.spec = spec;
  set.candidates.reserve(config.num_samples);
  set.h_values.reserve(config.num_samples);

  ParameterVector proposal;
  proposal.values.resize(dim);

  std::uint64_t window_count = 0;
  std::uint64_t window_accepts = 0;
  constexpr std::uint64_t kAdaptWindow = 100;

  for (std::uint64_t i = 0; i < total; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      proposal.values[j] = current.values[j] + step * rng.normal();
    }
    const double h_prop = log_joint(spec, proposal, data);
    const double u = rng.uniform_open_left();
    // accept with prob min(beta, 1), beta = exp(alpha * (h' - h))
    const bool accept = std::isfinite(h_prop) &&
                        std::log(u) <= config.alpha * (h_prop - h_current);
    if (accept) {
      current.values.swap(proposal.values);
      h_current = h_prop;
      ++window_accepts;
    }
    ++window_count;

    if (config.adapt_step && i < burn && window_count == kAdaptWindow) {
      const double rate =
          static_cast<double>(window_accepts) / static_cast<double>(window_count);
      step *= std::exp(0.5 * (rate - 0.25));
      window_count = 0;
      window_accepts = 0;
    }

    if (i >= burn) {
      set.candidates.push_back(current);
      set.h_values.push_back(h_current);
    }
  }

  set.provenance.seed = config.seed;
  set.provenance.source_seeds = {config.seed};
  set.provenance.created_at_unix =
      static_cast<std::uint64_t>(std::time(nullptr));
  set.provenance.config_digest = sha256_hex(canonical_config_text(spec, config));
  set.provenance.dataset_digest = sha256_hex(canonical_csv(data));
  set.validate();
  return set;
}

}  // namespace mcu
