#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ssmix/dataset.hpp"
#include "ssmix/ecm.hpp"
#include "ssmix/metrics.hpp"
#include "ssmix/simulate.hpp"

namespace ssmix {

// Generating missingness mechanism used by the experiment drivers. When
// target_rate is set the intercept is re-calibrated per dataset; otherwise
// the explicit intercept is used as-is.
struct MarSpec {
  LinkKind link = LinkKind::ao;
  double slope = -4.0;
  double lambda = 1.0;
  double intercept = 0.0;
  std::optional<double> target_rate = 0.7;

  std::variant<AoParams, LogitParams> mechanism() const;
};

struct ExperimentConfig {
  std::string experiment;
  SimSpec sim = SimSpec::defaults(Family::gaussian);
  MarSpec mar;
  EcmConfig ecm;
  int replicates = 20;
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  std::vector<double> rates{0.5, 0.6, 0.7, 0.8, 0.9};
  int grid_size = 2001;  // approx-check rows
  std::string magic_csv;
  bool magic_missing_sweep = false;

  void validate() const;

  // JSON round trip; parsing overrides only the keys present in the file.
  static ExperimentConfig from_json_file(const std::string& path);
  void apply_json_text(const std::string& text);
  std::string to_json_text() const;

  // FNV-1a hash of the canonical JSON dump, as fixed-width hex.
  std::string config_hash() const;
};

struct EstimatorResult {
  std::string name;  // ecm-ao | ecm-logit | logistic-baseline
  MetricsReport metrics;
  int iterations = 0;
  bool converged = true;
  double final_loglik = 0.0;
  bool separation_flag = false;
};

struct ReplicateRecord {
  int index = 0;
  std::uint64_t seed = 0;
  double realized_missing_rate = 0.0;
  std::vector<EstimatorResult> estimators;
};

struct AggregateRow {
  std::string estimator;
  // order: auc, logloss, brier, precision_opt, recall_opt, f1_opt
  std::array<double, 6> mean{};
  std::array<double, 6> sd{};
};

struct RunRecord {
  ExperimentConfig config;
  std::string family_label;  // set by the robustness driver
  std::vector<ReplicateRecord> replicates;
  std::vector<AggregateRow> aggregates;

  // Recomputes aggregates as plain mean/SD (population) over replicates.
  void aggregate();
};

// Scores every row of the dataset with the fitted mixture (probability of
// class 1) and with the labeled-only logistic baseline.
Eigen::VectorXd ecm_scores(const Dataset& dataset, const FullParams& params);

// Runs one simulated replicate: simulate, delete labels, fit the requested
// estimators, compute all-row metrics. Estimator names select what runs.
ReplicateRecord run_sim_replicate(const ExperimentConfig& config, const SimSpec& sim,
                                  int replicate_index,
                                  const std::vector<std::string>& estimators);

// Experiment drivers (pure computation; file emission lives in the CLI).
RunRecord run_simulate_fit(const ExperimentConfig& config);
RunRecord run_robustness_family(const ExperimentConfig& config, Family family);

struct SweepPoint {
  double rate = 0.0;
  double auc_ecm_ao = 0.0;
  double auc_logistic = 0.0;
};
std::vector<SweepPoint> run_missing_sweep(const ExperimentConfig& config);

struct ThresholdSweepRow {
  double threshold = 0.0;
  std::string metric;  // precision | recall | accuracy
  std::string estimator;
  double value = 0.0;
};
// Fits both estimators once on a 70%-missing dataset and sweeps thresholds.
std::vector<ThresholdSweepRow> run_threshold_sweep(const Dataset& dataset,
                                                   const ExperimentConfig& config);

struct ApproxRow {
  double m2 = 0.0;
  double exact = 0.0;
  double approx = 0.0;
};
std::vector<ApproxRow> run_approx_check(int grid_size);

struct MagicResult {
  RunRecord record;  // single replicate, two estimators
  std::vector<ThresholdSweepRow> threshold_rows;
  std::vector<SweepPoint> missing_rows;  // filled when requested
  Dataset prepared;                      // preprocessed, labels deleted
};
MagicResult run_magic(const ExperimentConfig& config);

// Supervised per-class moment fit on a fully labeled dataset; the
// preliminary oracle that defines margin confidence for MAGIC deletion.
MixtureParams preliminary_gaussian_fit(const Dataset& dataset, double ridge = 1e-6);

// --- emission helpers -------------------------------------------------------

// Writes a delimited text file: one timestamp comment line, one config-hash
// comment line, optional extra comment lines, then a comma-separated header
// and rows. Reruns differ only in the timestamp line.
void write_data_file(const std::string& path, const ExperimentConfig& config,
                     const std::vector<std::string>& extra_comments,
                     const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows);

// Long-format variant with string cells allowed.
void write_mixed_file(const std::string& path, const ExperimentConfig& config,
                      const std::vector<std::string>& columns,
                      const std::vector<std::vector<std::string>>& rows);

// Human-readable structured sidecar (JSON) for a run.
void write_run_record(const std::string& path, const RunRecord& record);

std::string format_double(double v);

}  // namespace ssmix
