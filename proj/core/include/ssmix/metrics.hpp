#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace ssmix {

// ROC built by sweeping the distinct score values as thresholds (descending,
// prediction rule: score >= threshold). thresholds[i] is the threshold that
// produces points[i]; thresholds[0] is +infinity for the (0, 0) corner.
struct RocCurve {
  std::vector<std::pair<double, double>> points;  // (fpr, tpr), (0,0) .. (1,1)
  std::vector<double> thresholds;
  double auc = 0.0;
};

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct SweepRow {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double accuracy = 0.0;
};

struct MetricsReport {
  double auc = 0.0;
  double logloss = 0.0;
  double brier = 0.0;
  double threshold_opt = 0.0;
  double precision_opt = 0.0;
  double recall_opt = 0.0;
  double f1_opt = 0.0;
  RocCurve roc;
};

// Ties are grouped into a single sweep step, so the trapezoidal AUC equals
// the Mann-Whitney statistic with half credit for ties. Throws when truth
// contains a single class.
RocCurve roc_and_auc(const Eigen::VectorXd& scores, const std::vector<int>& truth01);

// -(1/n) sum [y log p + (1-y) log(1-p)], natural log; scores clamped to
// [1e-12, 1-1e-12] before the logs.
double log_loss(const Eigen::VectorXd& scores, const std::vector<int>& truth01);

// (1/n) sum (p - y)^2.
double brier(const Eigen::VectorXd& scores, const std::vector<int>& truth01);

// argmax over the swept thresholds of TPR - FPR; ties resolved toward the
// smaller threshold.
double youden_threshold(const RocCurve& roc);

// predictions = score >= threshold; zero denominators yield zeros.
Prf prf_at_threshold(const Eigen::VectorXd& scores, const std::vector<int>& truth01,
                     double threshold);

std::vector<SweepRow> threshold_sweep(const Eigen::VectorXd& scores,
                                      const std::vector<int>& truth01, double lo = 0.3,
                                      double hi = 0.7, double step = 0.05);

// Full report: ROC/AUC, LogLoss, Brier, Youden-optimal threshold and the
// precision/recall/F1 at it.
MetricsReport compute_metrics(const Eigen::VectorXd& scores, const std::vector<int>& truth01);

}  // namespace ssmix
