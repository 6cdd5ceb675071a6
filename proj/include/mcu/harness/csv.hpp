#ifndef MCU_HARNESS_CSV_HPP
#define MCU_HARNESS_CSV_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "mcu/types.hpp"

namespace mcu::harness {

/// Which columns of a headered CSV form the dataset. Empty feature_columns
/// means "every column except the label column", in header order.
struct CsvSchema {
  std::string label_column;
  std::vector<std::string> feature_columns;
  Task task = Task::BinaryClassification;
};

/// Reads a UTF-8 CSV with a header row into a LabeledDataset. Row order is
/// preserved and rows get stable indices 0..n-1. Missing column ->
/// SchemaError; non-numeric cell -> ParseError naming row and column;
/// classification label outside {0,1} -> DataError naming the row.
LabeledDataset ingest_csv(const std::string& path, const CsvSchema& schema);
LabeledDataset ingest_csv(std::istream& in, const CsvSchema& schema,
                          const std::string& origin = "<stream>");

/// Writes a dataset as CSV (c0..c{d-1},label header) for round-tripping
/// generated data through the documented interchange format.
void write_csv(const LabeledDataset& data, const std::string& path);

/// Z-score standardization of every feature column (in place); constant
/// columns are left untouched. Returns per-column (mean, sd) so other
/// splits can reuse the training transform.
struct Standardization {
  std::vector<double> mean;
  std::vector<double> sd;
};
Standardization standardize_fit(LabeledDataset& data);
void standardize_apply(LabeledDataset& data, const Standardization& s);

}  // namespace mcu::harness

#endif
