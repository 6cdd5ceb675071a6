#ifndef MCU_TYPES_HPP
#define MCU_TYPES_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mcu {

/// A point theta in model-parameter space (weights + bias, or polynomial
/// coefficients). Entries must be finite; dim() is the length of values.
struct ParameterVector {
  std::vector<double> values;

  ParameterVector() = default;
  explicit ParameterVector(std::vector<double> v) : values(std::move(v)) {}
  ParameterVector(std::initializer_list<double> v) : values(v) {}

  std::size_t dim() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  bool all_finite() const;

  friend bool operator==(const ParameterVector& a, const ParameterVector& b) {
    return a.values == b.values;
  }
};

enum class Task { BinaryClassification, Regression };

/// Ordered (features, label) rows with a fixed feature dimension.
/// Row indices are stable: subsets are referenced by index lists.
struct LabeledDataset {
  struct Row {
    std::vector<double> features;
    double label = 0.0;
  };

  std::vector<Row> rows;
  std::size_t feature_dim = 0;
  Task task = Task::BinaryClassification;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }

  /// Rows at the given indices, in the order given. Out-of-range index
  /// throws InvalidArgumentError.
  LabeledDataset subset(std::span<const std::size_t> indices) const;

  /// All rows except the given indices, original order preserved.
  LabeledDataset without(std::span<const std::size_t> indices) const;

  /// Checks the dataset invariants (uniform feature_dim, labels in {0,1}
  /// for classification); throws DataError on violation.
  void validate() const;
};

enum class Family { LogisticRegression, LinearRegression };
enum class FeatureMapKind { Identity, Polynomial };

/// Declarative description of prior + likelihood family.
///
/// Identity feature map prepends a bias column: phi(x) = (1, x_1..x_d),
/// so the parameter dimension is feature_dim + 1. Polynomial applies to a
/// scalar input: phi(x) = (1, x, x^2, .., x^degree), dimension degree + 1.
/// Priors are independent Gaussians N(prior_mean, prior_variance) per
/// coordinate (the experiments all use mean 0).
struct ModelSpec {
  Family family = Family::LogisticRegression;
  FeatureMapKind feature_map = FeatureMapKind::Identity;
  unsigned poly_degree = 1;      // Polynomial only
  double prior_mean = 0.0;
  double prior_variance = 1.0;
  double noise_variance = 1.0;   // LinearRegression only

  /// Parameter dimension implied by this spec for inputs of feature_dim.
  std::size_t parameter_dim(std::size_t feature_dim) const;

  /// Throws InvalidArgumentError if variances are not positive or the
  /// polynomial map is combined with non-scalar features.
  void validate(std::size_t feature_dim) const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

std::string family_name(Family f);
std::string feature_map_name(FeatureMapKind m);
std::string task_name(Task t);
Family family_from_name(const std::string& s);
FeatureMapKind feature_map_from_name(const std::string& s);
Task task_from_name(const std::string& s);

/// Writes the expanded feature vector phi(x) into `out` (resized).
void expand_features(const ModelSpec& spec, std::span<const double> x,
                     std::vector<double>& out);

/// Canonical CSV serialization of a dataset: a task line, a header line
/// c0..c{d-1},label, then one row per datum with shortest round-trip
/// double formatting. This is the byte stream the dataset digest hashes.
std::string canonical_csv(const LabeledDataset& data);

/// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double v);

}  // namespace mcu

#endif
