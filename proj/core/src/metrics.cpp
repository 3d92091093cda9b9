#include "ssmix/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ssmix/missingness.hpp"

namespace ssmix {

RocCurve roc_and_auc(const Eigen::VectorXd& scores, const std::vector<int>& truth01) {
  const long n = scores.size();
  if (static_cast<long>(truth01.size()) != n) {
    throw std::invalid_argument("roc_and_auc: size mismatch");
  }
  long pos = 0;
  for (int y : truth01) pos += (y != 0);
  const long neg = n - pos;
  if (pos == 0 || neg == 0) {
    throw std::invalid_argument("roc_and_auc: both classes must be present in truth");
  }

  std::vector<long> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](long a, long b) { return scores(a) > scores(b); });

  RocCurve roc;
  roc.points.emplace_back(0.0, 0.0);
  roc.thresholds.push_back(std::numeric_limits<double>::infinity());

  long tp = 0, fp = 0;
  double auc = 0.0;
  long i = 0;
  while (i < n) {
    const double s = scores(order[i]);
    long j = i;
    long tp_step = 0, fp_step = 0;
    while (j < n && scores(order[j]) == s) {
      tp_step += (truth01[order[j]] != 0);
      fp_step += (truth01[order[j]] == 0);
      ++j;
    }
    // trapezoid over the tie group = half credit for tied pairs
    auc += static_cast<double>(fp_step) * (static_cast<double>(tp) + 0.5 * tp_step);
    tp += tp_step;
    fp += fp_step;
    roc.points.emplace_back(static_cast<double>(fp) / neg, static_cast<double>(tp) / pos);
    roc.thresholds.push_back(s);
    i = j;
  }
  roc.auc = auc / (static_cast<double>(pos) * static_cast<double>(neg));
  return roc;
}

double log_loss(const Eigen::VectorXd& scores, const std::vector<int>& truth01) {
  const long n = scores.size();
  if (static_cast<long>(truth01.size()) != n) {
    throw std::invalid_argument("log_loss: size mismatch");
  }
  double total = 0.0;
  for (long j = 0; j < n; ++j) {
    double p = std::clamp(scores(j), kProbClamp, 1.0 - kProbClamp);
    total += truth01[j] ? std::log(p) : std::log1p(-p);
  }
  return -total / static_cast<double>(n);
}

double brier(const Eigen::VectorXd& scores, const std::vector<int>& truth01) {
  const long n = scores.size();
  if (static_cast<long>(truth01.size()) != n) {
    throw std::invalid_argument("brier: size mismatch");
  }
  double total = 0.0;
  for (long j = 0; j < n; ++j) {
    const double e = scores(j) - (truth01[j] ? 1.0 : 0.0);
    total += e * e;
  }
  return total / static_cast<double>(n);
}

double youden_threshold(const RocCurve& roc) {
  double best_j = -std::numeric_limits<double>::infinity();
  double best_thr = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < roc.points.size(); ++i) {
    const double j = roc.points[i].second - roc.points[i].first;
    if (j > best_j || (j == best_j && roc.thresholds[i] < best_thr)) {
      best_j = j;
      best_thr = roc.thresholds[i];
    }
  }
  return best_thr;
}

Prf prf_at_threshold(const Eigen::VectorXd& scores, const std::vector<int>& truth01,
                     double threshold) {
  long tp = 0, fp = 0, fn = 0;
  for (long j = 0; j < scores.size(); ++j) {
    const bool pred = scores(j) >= threshold;
    const bool truth = truth01[j] != 0;
    tp += (pred && truth);
    fp += (pred && !truth);
    fn += (!pred && truth);
  }
  Prf out;
  out.precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  out.recall = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
  out.f1 = (out.precision + out.recall) > 0.0
               ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
               : 0.0;
  return out;
}

std::vector<SweepRow> threshold_sweep(const Eigen::VectorXd& scores,
                                      const std::vector<int>& truth01, double lo, double hi,
                                      double step) {
  std::vector<SweepRow> rows;
  const int count = static_cast<int>(std::round((hi - lo) / step)) + 1;
  for (int i = 0; i < count; ++i) {
    const double thr = lo + i * step;
    const Prf prf = prf_at_threshold(scores, truth01, thr);
    long correct = 0;
    for (long j = 0; j < scores.size(); ++j) {
      const bool pred = scores(j) >= thr;
      correct += (pred == (truth01[j] != 0));
    }
    rows.push_back({thr, prf.precision, prf.recall,
                    static_cast<double>(correct) / static_cast<double>(scores.size())});
  }
  return rows;
}

MetricsReport compute_metrics(const Eigen::VectorXd& scores, const std::vector<int>& truth01) {
  MetricsReport report;
  report.roc = roc_and_auc(scores, truth01);
  report.auc = report.roc.auc;
  report.logloss = log_loss(scores, truth01);
  report.brier = brier(scores, truth01);
  report.threshold_opt = youden_threshold(report.roc);
  const Prf prf = prf_at_threshold(scores, truth01, report.threshold_opt);
  report.precision_opt = prf.precision;
  report.recall_opt = prf.recall;
  report.f1_opt = prf.f1;
  return report;
}

}  // namespace ssmix
