#include "mcu/metrics.hpp"

#include "mcu/errors.hpp"
#include "mcu/model.hpp"

namespace mcu {

double evaluate_accuracy(const ModelSpec& spec, const ParameterVector& theta,
                         const LabeledDataset& data) {
  if (data.task != Task::BinaryClassification) {
    throw InvalidArgumentError(
        "evaluate_accuracy needs classification data; use mean_squared_error");
  }
  if (data.empty()) throw InvalidArgumentError("evaluate_accuracy needs data");
  std::size_t correct = 0;
  for (const auto& row : data.rows) {
    const double p = predict(spec, theta, row.features);
    const double predicted = p >= 0.5 ? 1.0 : 0.0;  // ties classify as 1
    if (predicted == row.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double mean_squared_error(const ModelSpec& spec, const ParameterVector& theta,
                          const LabeledDataset& data) {
  if (data.empty()) throw InvalidArgumentError("mean_squared_error needs data");
  double sum = 0.0;
  for (const auto& row : data.rows) {
    const double r = row.label - predict(spec, theta, row.features);
    sum += r * r;
  }
  return sum / static_cast<double>(data.size());
}

}  // namespace mcu
