#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ssmix {

// Per-column affine standardization record: standardized = (x - mean) / scale.
struct AffineTransform {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd invert(const Eigen::MatrixXd& z) const;
};

// A partially labeled sample. Class labels are 1-based; observed_labels[j] == 0
// encodes a missing label and must agree with missing_flags[j].
struct Dataset {
  Eigen::MatrixXd features;                 // n x d
  std::vector<int> true_labels;             // size n, or empty when unknown
  std::vector<int> observed_labels;         // size n, 0 = missing
  std::vector<std::uint8_t> missing_flags;  // size n, 1 iff label missing
  std::vector<std::string> column_names;    // optional, size d when present
  std::optional<AffineTransform> standardization;
  std::uint64_t seed = 0;  // seed the sample was generated from, when synthetic

  long n() const { return features.rows(); }
  long dim() const { return features.cols(); }

  long num_labeled() const;
  double realized_missing_rate() const;

  // Row indices with an observed label.
  std::vector<long> labeled_rows() const;

  // Throws DataError on any internal inconsistency.
  void validate() const;

  // Fully labeled dataset from features + labels (no missing entries).
  static Dataset fully_labeled(Eigen::MatrixXd features, std::vector<int> labels,
                               std::uint64_t seed = 0);
};

// Writes the dataset as comma-separated text: the d feature columns (named
// when column names are present), true_label, observed_label (empty when
// missing), missing_flag.
void write_dataset_csv(const Dataset& dataset, const std::string& path);

}  // namespace ssmix
