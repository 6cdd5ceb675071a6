#include "mcu/explain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "mcu/errors.hpp"
#include "mcu/metrics.hpp"
#include "mcu/unlearner.hpp"

namespace mcu {

namespace {

const ParameterVector& pick(const UnlearnResult& r, Estimator e) {
  return e == Estimator::MapCandidate ? r.map_candidate : r.weighted_mean;
}

double quantile(std::vector<double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

std::string estimator_name(Estimator e) {
  return e == Estimator::MapCandidate ? "map-candidate" : "weighted-mean";
}

Estimator estimator_from_name(const std::string& s) {
  if (s == "map-candidate" || s == "map") return Estimator::MapCandidate;
  if (s == "weighted-mean" || s == "mean") return Estimator::WeightedMean;
  throw InvalidArgumentError("unknown estimator: " + s);
}

SubsetInfluenceReport subset_influence(
    const CandidateSet& set,
    const std::vector<std::pair<std::string, LabeledDataset>>& subsets,
    const LabeledDataset& eval_data, Estimator estimator,
    const std::string& eval_set_id) {
  if (subsets.empty()) {
    throw InvalidArgumentError("subset_influence requires at least one subset");
  }
  if (eval_data.empty()) {
    throw InvalidArgumentError("subset_influence requires evaluation data");
  }

  LabeledDataset nothing;
  nothing.feature_dim = eval_data.feature_dim;
  nothing.task = eval_data.task;
  const UnlearnResult baseline = unlearn(set, nothing);
  const double accuracy_before =
      evaluate_accuracy(set.spec, pick(baseline, estimator), eval_data);

  SubsetInfluenceReport report;
  report.estimator = estimator;
  report.eval_set_id = eval_set_id;
  report.entries.reserve(subsets.size());
  for (const auto& [id, subset] : subsets) {
    const UnlearnResult r = unlearn(set, subset);
    SubsetInfluenceReport::Entry e;
    e.subset_id = id;
    e.subset_size = subset.size();
    e.accuracy_before = accuracy_before;
    e.accuracy_after = evaluate_accuracy(set.spec, pick(r, estimator), eval_data);
    e.delta = e.accuracy_after - e.accuracy_before;
    e.ess = r.ess;
    report.entries.push_back(std::move(e));
  }

  std::sort(report.entries.begin(), report.entries.end(),
            [](const auto& a, const auto& b) {
              if (a.delta != b.delta) return a.delta > b.delta;
              return a.subset_id < b.subset_id;
            });

  std::vector<double> deltas;
  deltas.reserve(report.entries.size());
  for (const auto& e : report.entries) deltas.push_back(e.delta);
  std::sort(deltas.begin(), deltas.end());
  report.delta_q1 = quantile(deltas, 0.25);
  report.delta_median = quantile(deltas, 0.5);
  report.delta_q3 = quantile(deltas, 0.75);
  return report;
}

std::string report_to_json(const SubsetInfluenceReport& report) {
  nlohmann::json j;
  j["eval_set_id"] = report.eval_set_id;
  j["estimator"] = estimator_name(report.estimator);
  j["delta_quartiles"] = {{"q1", report.delta_q1},
                          {"median", report.delta_median},
                          {"q3", report.delta_q3}};
  j["entries"] = nlohmann::json::array();
  for (const auto& e : report.entries) {
    j["entries"].push_back({{"subset_id", e.subset_id},
                            {"subset_size", e.subset_size},
                            {"accuracy_before", e.accuracy_before},
                            {"accuracy_after", e.accuracy_after},
                            {"delta", e.delta},
                            {"ess", e.ess}});
  }
  return j.dump(2);
}

std::string report_to_csv(const SubsetInfluenceReport& report) {
  std::ostringstream out;
  out << "subset_id,subset_size,accuracy_before,accuracy_after,delta,ess\n";
  for (const auto& e : report.entries) {
    out << e.subset_id << "," << e.subset_size << ","
        << format_double(e.accuracy_before) << ","
        << format_double(e.accuracy_after) << "," << format_double(e.delta)
        << "," << format_double(e.ess) << "\n";
  }
  return out.str();
}

}  // namespace mcu
