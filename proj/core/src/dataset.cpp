#include "ssmix/dataset.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ssmix/error.hpp"

namespace ssmix {

Eigen::MatrixXd AffineTransform::apply(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd z = x;
  for (long c = 0; c < z.cols(); ++c) {
    z.col(c) = (z.col(c).array() - mean(c)) / scale(c);
  }
  return z;
}

Eigen::MatrixXd AffineTransform::invert(const Eigen::MatrixXd& z) const {
  Eigen::MatrixXd x = z;
  for (long c = 0; c < x.cols(); ++c) {
    x.col(c) = x.col(c).array() * scale(c) + mean(c);
  }
  return x;
}

long Dataset::num_labeled() const {
  long count = 0;
  for (auto f : missing_flags) count += (f == 0);
  return count;
}

double Dataset::realized_missing_rate() const {
  if (missing_flags.empty()) return 0.0;
  return 1.0 - static_cast<double>(num_labeled()) / static_cast<double>(missing_flags.size());
}

std::vector<long> Dataset::labeled_rows() const {
  std::vector<long> rows;
  rows.reserve(missing_flags.size());
  for (long j = 0; j < static_cast<long>(missing_flags.size()); ++j) {
    if (missing_flags[j] == 0) rows.push_back(j);
  }
  return rows;
}

void Dataset::validate() const {
  const auto nn = static_cast<std::size_t>(n());
  if (observed_labels.size() != nn || missing_flags.size() != nn) {
    throw DataError("dataset: label/flag arrays do not match row count");
  }
  if (!true_labels.empty() && true_labels.size() != nn) {
    throw DataError("dataset: true_labels size does not match row count");
  }
  if (!column_names.empty() && column_names.size() != static_cast<std::size_t>(dim())) {
    throw DataError("dataset: column_names size does not match feature count");
  }
  for (std::size_t j = 0; j < nn; ++j) {
    const bool missing = missing_flags[j] != 0;
    if (missing != (observed_labels[j] == 0)) {
      throw DataError("dataset: missing_flags[" + std::to_string(j) +
                      "] inconsistent with observed_labels");
    }
    if (!missing && !true_labels.empty() && observed_labels[j] != true_labels[j]) {
      throw DataError("dataset: observed label differs from true label at row " +
                      std::to_string(j));
    }
  }
}

void write_dataset_csv(const Dataset& dataset, const std::string& path) {
  dataset.validate();
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("write_dataset_csv: cannot write " + path);

  const long d = dataset.dim();
  for (long c = 0; c < d; ++c) {
    if (!dataset.column_names.empty()) out << dataset.column_names[c];
    else out << "f" << c;
    out << ',';
  }
  out << "true_label,observed_label,missing_flag\n";

  char buf[40];
  for (long j = 0; j < dataset.n(); ++j) {
    for (long c = 0; c < d; ++c) {
      std::snprintf(buf, sizeof(buf), "%.12g", dataset.features(j, c));
      out << buf << ',';
    }
    if (!dataset.true_labels.empty()) out << dataset.true_labels[j];
    out << ',';
    if (dataset.missing_flags[j] == 0) out << dataset.observed_labels[j];
    out << ',' << int(dataset.missing_flags[j]) << '\n';
  }
}

Dataset Dataset::fully_labeled(Eigen::MatrixXd features, std::vector<int> labels,
                               std::uint64_t seed) {
  Dataset ds;
  ds.features = std::move(features);
  ds.observed_labels = labels;
  ds.true_labels = std::move(labels);
  ds.missing_flags.assign(ds.true_labels.size(), 0);
  ds.seed = seed;
  ds.validate();
  return ds;
}

}  // namespace ssmix
