#include "mcu/types.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "mcu/errors.hpp"

namespace mcu {

bool ParameterVector::all_finite() const {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
  LabeledDataset out;
  out.feature_dim = feature_dim;
  out.task = task;
  out.rows.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= rows.size()) {
      throw InvalidArgumentError("subset index " + std::to_string(i) +
                                 " out of range for dataset of size " +
                                 std::to_string(rows.size()));
    }
    out.rows.push_back(rows[i]);
  }
  return out;
}

LabeledDataset LabeledDataset::without(std::span<const std::size_t> indices) const {
  std::vector<bool> drop(rows.size(), false);
  for (std::size_t i : indices) {
    if (i >= rows.size()) {
      throw InvalidArgumentError("erase index " + std::to_string(i) +
                                 " out of range for dataset of size " +
                                 std::to_string(rows.size()));
    }
    drop[i] = true;
  }
  LabeledDataset out;
  out.feature_dim = feature_dim;
  out.task = task;
  out.rows.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!drop[i]) out.rows.push_back(rows[i]);
  }
  return out;
}

void LabeledDataset::validate() const {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    if (r.features.size() != feature_dim) {
      throw DataError("row " + std::to_string(i) + " has " +
                      std::to_string(r.features.size()) +
                      " features, expected " + std::to_string(feature_dim));
    }
    for (double v : r.features) {
      if (!std::isfinite(v)) {
        throw DataError("row " + std::to_string(i) + " has a non-finite feature");
      }
    }
    if (!std::isfinite(r.label)) {
      throw DataError("row " + std::to_string(i) + " has a non-finite label");
    }
    if (task == Task::BinaryClassification && r.label != 0.0 && r.label != 1.0) {
      throw DataError("row " + std::to_string(i) + " has label " +
                      format_double(r.label) +
                      ", expected 0 or 1 for binary classification");
    }
  }
}

std::size_t ModelSpec::parameter_dim(std::size_t feature_dim) const {
  if (feature_map == FeatureMapKind::Polynomial) return poly_degree + 1;
  return feature_dim + 1;  // bias column plus the raw features
}

void ModelSpec::validate(std::size_t feature_dim) const {
  if (!(prior_variance > 0.0)) {
    throw InvalidArgumentError("prior_variance must be positive");
  }
  if (family == Family::LinearRegression && !(noise_variance > 0.0)) {
    throw InvalidArgumentError("noise_variance must be positive");
  }
  if (feature_map == FeatureMapKind::Polynomial) {
    if (poly_degree < 1) {
      throw InvalidArgumentError("polynomial degree must be >= 1");
    }
    if (feature_dim != 1) {
      throw InvalidArgumentError(
          "polynomial feature map requires scalar inputs, got feature_dim " +
          std::to_string(feature_dim));
    }
  }
}

std::string family_name(Family f) {
  return f == Family::LogisticRegression ? "logistic-regression"
                                         : "linear-regression";
}

std::string feature_map_name(FeatureMapKind m) {
  return m == FeatureMapKind::Identity ? "identity" : "polynomial";
}

std::string task_name(Task t) {
  return t == Task::BinaryClassification ? "binary-classification" : "regression";
}

Family family_from_name(const std::string& s) {
  if (s == "logistic-regression" || s == "logistic") return Family::LogisticRegression;
  if (s == "linear-regression" || s == "linear") return Family::LinearRegression;
  throw InvalidArgumentError("unknown model family: " + s);
}

FeatureMapKind feature_map_from_name(const std::string& s) {
  if (s == "identity") return FeatureMapKind::Identity;
  if (s == "polynomial") return FeatureMapKind::Polynomial;
  throw InvalidArgumentError("unknown feature map: " + s);
}

Task task_from_name(const std::string& s) {
  if (s == "binary-classification" || s == "classification")
    return Task::BinaryClassification;
  if (s == "regression") return Task::Regression;
  throw InvalidArgumentError("unknown task: " + s);
}

void expand_features(const ModelSpec& spec, std::span<const double> x,
                     std::vector<double>& out) {
  if (spec.feature_map == FeatureMapKind::Polynomial) {
    if (x.size() != 1) {
      throw InvalidArgumentError("polynomial feature map expects 1 feature, got " +
                                 std::to_string(x.size()));
    }
    out.resize(spec.poly_degree + 1);
    double p = 1.0;
    for (unsigned d = 0; d <= spec.poly_degree; ++d) {
      out[d] = p;
      p *= x[0];
    }
  } else {
    out.resize(x.size() + 1);
    out[0] = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) out[i + 1] = x[i];
  }
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string canonical_csv(const LabeledDataset& data) {
  std::ostringstream out;
  out << "task," << task_name(data.task) << "\n";
  for (std::size_t j = 0; j < data.feature_dim; ++j) out << "c" << j << ",";
  out << "label\n";
  for (const auto& row : data.rows) {
    for (double v : row.features) out << format_double(v) << ",";
    out << format_double(row.label) << "\n";
  }
  return out.str();
}

}  // namespace mcu
