#include "mcu/unlearner.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include <json.hpp>

#include "mcu/errors.hpp"
#include "mcu/model.hpp"

namespace mcu {

std::vector<double> compute_g(const CandidateSet& set,
                              const LabeledDataset& erased) {
  set.validate();
  if (!erased.empty() &&
      set.spec.parameter_dim(erased.feature_dim) != set.dim()) {
    throw InvalidArgumentError(
        "erased data feature_dim is inconsistent with the candidate set");
  }
  const std::size_t m = set.size();
  std::vector<double> g(m);
  double ll = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    // Rejected proposals repeat the previous candidate; reuse its value.
    if (i == 0 || !(set.candidates[i] == set.candidates[i - 1])) {
      ll = log_likelihood(set.spec, set.candidates[i], erased);
    }
    g[i] = set.h_values[i] - ll;
  }
  return g;
}

std::vector<double> compute_weights(const CandidateSet& set,
                                    const std::vector<double>& g_values) {
  set.validate();
  if (g_values.size() != set.size()) {
    throw InvalidArgumentError("g_values length " +
                               std::to_string(g_values.size()) +
                               " does not match candidate count " +
                               std::to_string(set.size()));
  }
  const std::size_t m = g_values.size();
  std::vector<double> logw(m);
  double max_logw = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    if (std::isnan(g_values[i])) {
      throw InvalidArgumentError("NaN in g_values at index " + std::to_string(i));
    }
    logw[i] = g_values[i] - set.alpha * set.h_values[i];
    max_logw = std::fmax(max_logw, logw[i]);
  }
  std::vector<double> w(m);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    w[i] = std::exp(logw[i] - max_logw);  // max term is exp(0) = 1
    sum += w[i];
  }
  for (double& wi : w) wi /= sum;
  return w;
}

UnlearnResult unlearn(const CandidateSet& set, const LabeledDataset& erased) {
  UnlearnResult result;
  result.g_values = compute_g(set, erased);
  result.weights = compute_weights(set, result.g_values);
  result.alpha = set.alpha;

  const std::size_t m = set.size();
  result.map_index = 0;
  for (std::size_t i = 1; i < m; ++i) {
    if (result.g_values[i] > result.g_values[result.map_index]) {
      result.map_index = i;  // ties keep the lowest index
    }
  }
  result.map_candidate = set.candidates[result.map_index];

  const std::size_t dim = set.dim();
  result.weighted_mean.values.assign(dim, 0.0);
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double wi = result.weights[i];
    sum_sq += wi * wi;
    for (std::size_t j = 0; j < dim; ++j) {
      result.weighted_mean.values[j] += wi * set.candidates[i].values[j];
    }
  }
  result.ess = 1.0 / sum_sq;

  if (result.ess < 0.01 * static_cast<double>(m)) {
    std::cerr << "[warn] unlearn: effective sample size " << result.ess
              << " is below 1% of M=" << m
              << "; the candidate set may not cover the unlearned posterior "
                 "(consider a smaller alpha)\n";
  }
  return result;
}

std::string unlearn_result_to_json(const UnlearnResult& result,
                                   std::size_t array_elision_threshold) {
  nlohmann::json j;
  j["alpha"] = result.alpha;
  j["m"] = result.g_values.size();
  j["map_index"] = result.map_index;
  j["map_candidate"] = result.map_candidate.values;
  j["weighted_mean"] = result.weighted_mean.values;
  j["ess"] = result.ess;

  const auto [gmin, gmax] =
      std::minmax_element(result.g_values.begin(), result.g_values.end());
  j["g_summary"] = {{"min", *gmin}, {"max", *gmax}};
  j["weight_summary"] = {
      {"max", *std::max_element(result.weights.begin(), result.weights.end())}};

  if (result.g_values.size() <= array_elision_threshold) {
    j["g_values"] = result.g_values;
    j["weights"] = result.weights;
  } else {
    j["arrays_elided"] = true;
  }
  return j.dump(2);
}

}  // namespace mcu
