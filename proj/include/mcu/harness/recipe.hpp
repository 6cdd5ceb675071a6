#ifndef MCU_HARNESS_RECIPE_HPP
#define MCU_HARNESS_RECIPE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcu/baselines.hpp"
#include "mcu/errors.hpp"
#include "mcu/harness/csv.hpp"
#include "mcu/sampler.hpp"
#include "mcu/types.hpp"

namespace mcu::harness {

/// How the erased subsets of a recipe are constructed.
struct ErasedRule {
  enum class Kind { ExplicitIndices, RandomK, NearestNeighborFlip };
  Kind kind = Kind::RandomK;
  std::vector<std::vector<std::size_t>> explicit_subsets;
  std::size_t k = 0;      // subset size (RandomK, NearestNeighborFlip)
  std::size_t count = 1;  // number of subsets / corrupt variants
};

/// Declarative experiment description; JSON grammar in docs/formats.md.
struct ExperimentRecipe {
  std::string name;
  std::uint64_t seed = 0;
  ModelSpec model;

  // Either a CSV source or a synthetic generator kind.
  std::string data_csv;
  CsvSchema schema;
  std::string generator_kind;

  bool standardize = false;      // z-score features, fitted on D
  double test_fraction = 0.0;    // held out from the CSV before training

  SamplerConfig sampler;         // alpha ignored; one run per entry of alphas
  std::vector<double> alphas{1.0};
  ErasedRule erased;
  std::vector<std::string> baselines;  // subset of {"retrain", "influence"}
  OptimizerConfig optimizer;
  unsigned workers = 1;
  std::string output_dir = ".";
};

/// One row of the metrics table. CSV column order is fixed:
/// model_tag, split, accuracy, wall_time_seconds, subset_id.
struct MetricsRecord {
  std::string model_tag;  // trained-D | retrained-Dr | mcu-a<alpha> | bif-like
  std::string split;      // train | test | erased | clean
  double accuracy = 0.0;
  double wall_time_seconds = 0.0;
  std::string subset_id;
};

/// A recipe stage failure, wrapping the failing stage's error text and the
/// exit code its class maps to.
class RecipeError : public Error {
 public:
  RecipeError(const std::string& stage, const std::string& what, int exit_code)
      : Error("recipe stage '" + stage + "' failed: " + what),
        stage_name(stage),
        suggested_exit(exit_code) {}
  std::string stage_name;
  int suggested_exit;
};

ExperimentRecipe parse_recipe(const std::string& json_text);
ExperimentRecipe load_recipe_file(const std::string& path);

/// Executes train -> sample -> per-subset unlearn/baselines -> evaluate,
/// writing candidate sets, unlearn-result JSON, and metrics.csv /
/// metrics.json under output_dir. Deterministic given seeds except the
/// wall_time fields. Returns the metric rows in a fixed order.
std::vector<MetricsRecord> run_recipe(const ExperimentRecipe& recipe);

std::string metrics_to_csv(const std::vector<MetricsRecord>& records);
std::string metrics_to_json(const std::vector<MetricsRecord>& records);

}  // namespace mcu::harness

#endif
