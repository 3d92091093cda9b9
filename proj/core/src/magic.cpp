#include "ssmix/magic.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "ssmix/error.hpp"

namespace ssmix {

namespace {

bool parse_double(const std::string& field, double& out) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    fields.push_back(field);
  }
  return fields;
}

}  // namespace

Dataset load_magic_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("load_magic_csv: cannot open " + path);

  std::vector<std::array<double, 10>> rows;
  std::vector<int> labels;
  std::string line;
  long line_number = 0;
  bool first_data_line = true;

  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (first_data_line) {
      double probe;
      if (!fields.empty() && !parse_double(fields[0], probe)) {
        first_data_line = false;  // header line, skip
        continue;
      }
      first_data_line = false;
    }
    if (fields.size() != 11) {
      throw DataError("load_magic_csv: expected 11 fields at line " +
                      std::to_string(line_number));
    }
    std::array<double, 10> values{};
    for (int c = 0; c < 10; ++c) {
      if (!parse_double(fields[c], values[c])) {
        throw DataError("load_magic_csv: non-numeric field at line " +
                        std::to_string(line_number));
      }
    }
    int label;
    if (fields[10] == "g") label = 1;
    else if (fields[10] == "h") label = 2;
    else {
      throw DataError("load_magic_csv: class must be g or h at line " +
                      std::to_string(line_number));
    }
    rows.push_back(values);
    labels.push_back(label);
  }

  if (rows.empty()) throw DataError("load_magic_csv: no data rows in " + path);
  if (static_cast<long>(rows.size()) != kMagicExpectedRows) {
    std::cerr << "warning: " << path << " has " << rows.size() << " rows, expected "
              << kMagicExpectedRows << "\n";
  }

  Eigen::MatrixXd features(static_cast<long>(rows.size()), 10);
  for (long j = 0; j < features.rows(); ++j) {
    for (int c = 0; c < 10; ++c) features(j, c) = rows[j][c];
  }
  Dataset ds = Dataset::fully_labeled(std::move(features), std::move(labels));
  ds.column_names.assign(kMagicColumns.begin(), kMagicColumns.end());
  return ds;
}

Dataset preprocess_magic(const Dataset& dataset) {
  if (dataset.column_names.empty()) {
    throw DataError("preprocess_magic: dataset has no column names");
  }
  std::vector<long> indices;
  for (const char* wanted : kMagicModelColumns) {
    long found = -1;
    for (long c = 0; c < static_cast<long>(dataset.column_names.size()); ++c) {
      if (dataset.column_names[c] == wanted) {
        found = c;
        break;
      }
    }
    if (found < 0) throw DataError(std::string("preprocess_magic: missing column ") + wanted);
    indices.push_back(found);
  }

  const long n = dataset.n();
  Eigen::MatrixXd selected(n, static_cast<long>(indices.size()));
  for (std::size_t c = 0; c < indices.size(); ++c) {
    selected.col(static_cast<long>(c)) = dataset.features.col(indices[c]);
  }

  AffineTransform transform;
  transform.mean.resize(selected.cols());
  transform.scale.resize(selected.cols());
  for (long c = 0; c < selected.cols(); ++c) {
    const double mean = selected.col(c).mean();
    const double var = (selected.col(c).array() - mean).square().sum() / static_cast<double>(n);
    transform.mean(c) = mean;
    transform.scale(c) = std::sqrt(var);
    if (!(transform.scale(c) > 0.0)) {
      throw DataError("preprocess_magic: constant column " +
                      std::string(kMagicModelColumns[c]));
    }
  }

  Dataset out = dataset;
  out.features = transform.apply(selected);
  out.column_names.assign(kMagicModelColumns.begin(), kMagicModelColumns.end());
  out.standardization = transform;
  return out;
}

}  // namespace ssmix
