#include "mcu/harness/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mcu/errors.hpp"

namespace mcu::harness {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim spaces and stray carriage returns
    std::size_t a = field.find_first_not_of(" \t\r");
    std::size_t b = field.find_last_not_of(" \t\r");
    fields.push_back(a == std::string::npos ? "" : field.substr(a, b - a + 1));
  }
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_cell(const std::string& cell, std::size_t row,
                  const std::string& column, const std::string& origin) {
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(origin + ": non-numeric value '" + cell + "' at row " +
                     std::to_string(row) + ", column '" + column + "'");
  }
  return v;
}

}  // namespace

LabeledDataset ingest_csv(std::istream& in, const CsvSchema& schema,
                          const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) {
    throw SchemaError(origin + ": missing header row");
  }
  const std::vector<std::string> header = split_line(line);

  auto column_index = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw SchemaError(origin + ": column '" + name + "' not found in header");
  };

  const std::size_t label_idx = column_index(schema.label_column);
  std::vector<std::size_t> feature_idx;
  std::vector<std::string> feature_names;
  if (schema.feature_columns.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i != label_idx) {
        feature_idx.push_back(i);
        feature_names.push_back(header[i]);
      }
    }
  } else {
    for (const std::string& name : schema.feature_columns) {
      feature_idx.push_back(column_index(name));
      feature_names.push_back(name);
    }
  }
  if (feature_idx.empty()) {
    throw SchemaError(origin + ": no feature columns");
  }

  LabeledDataset data;
  data.feature_dim = feature_idx.size();
  data.task = schema.task;

  std::size_t row_number = 0;  // data row index, header excluded
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      throw ParseError(origin + ": row " + std::to_string(row_number) + " has " +
                       std::to_string(cells.size()) + " cells, header has " +
                       std::to_string(header.size()));
    }
    LabeledDataset::Row row;
    row.features.reserve(feature_idx.size());
    for (std::size_t k = 0; k < feature_idx.size(); ++k) {
      row.features.push_back(
          parse_cell(cells[feature_idx[k]], row_number, feature_names[k], origin));
    }
    row.label =
        parse_cell(cells[label_idx], row_number, schema.label_column, origin);
    if (schema.task == Task::BinaryClassification && row.label != 0.0 &&
        row.label != 1.0) {
      throw DataError(origin + ": row " + std::to_string(row_number) +
                      " has label " + cells[label_idx] +
                      ", classification labels must be 0 or 1");
    }
    data.rows.push_back(std::move(row));
    ++row_number;
  }
  data.validate();
  return data;
}

LabeledDataset ingest_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return ingest_csv(in, schema, path);
}

void write_csv(const LabeledDataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (std::size_t j = 0; j < data.feature_dim; ++j) out << "c" << j << ",";
  out << "label\n";
  for (const auto& row : data.rows) {
    for (double v : row.features) out << format_double(v) << ",";
    out << format_double(row.label) << "\n";
  }
  if (!out) throw IoError("write to " + path + " failed");
}

Standardization standardize_fit(LabeledDataset& data) {
  Standardization s;
  s.mean.assign(data.feature_dim, 0.0);
  s.sd.assign(data.feature_dim, 1.0);
  if (data.empty()) return s;
  const double n = static_cast<double>(data.size());
  for (const auto& row : data.rows) {
    for (std::size_t j = 0; j < data.feature_dim; ++j) {
      s.mean[j] += row.features[j];
    }
  }
  for (double& m : s.mean) m /= n;
  std::vector<double> var(data.feature_dim, 0.0);
  for (const auto& row : data.rows) {
    for (std::size_t j = 0; j < data.feature_dim; ++j) {
      const double d = row.features[j] - s.mean[j];
      var[j] += d * d;
    }
  }
  for (std::size_t j = 0; j < data.feature_dim; ++j) {
    const double sd = std::sqrt(var[j] / n);
    if (sd > 0.0) s.sd[j] = sd;
  }
  standardize_apply(data, s);
  return s;
}

void standardize_apply(LabeledDataset& data, const Standardization& s) {
  if (s.mean.size() != data.feature_dim) {
    throw InvalidArgumentError("standardization dimension mismatch");
  }
  for (auto& row : data.rows) {
    for (std::size_t j = 0; j < data.feature_dim; ++j) {
      row.features[j] = (row.features[j] - s.mean[j]) / s.sd[j];
    }
  }
}

}  // namespace mcu::harness
