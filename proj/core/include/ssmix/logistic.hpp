#pragma once

#include <Eigen/Dense>
#include <vector>

namespace ssmix {

struct LogisticModel {
  Eigen::VectorXd coefficients;  // (d+1), intercept first
  bool fitted = false;
  long n_train = 0;
  bool separation_flag = false;  // max |coefficient| exceeded 30 during fitting
};

struct LogisticConfig {
  int max_iters = 100;
  double grad_tol = 1e-8;      // on ||X^T (y - p)||_2
  double ridge = 1e-8;         // added to the normal equations
  double separation_cap = 30.0;
};

// Iteratively reweighted least squares with step halving (deviance never
// increases across iterations). labels01 must contain both classes and
// features must have at least d+1 rows.
LogisticModel fit_irls(const Eigen::MatrixXd& features, const std::vector<int>& labels01,
                       const LogisticConfig& config = {});

// logistic(intercept + x . coef), clamped to [1e-12, 1 - 1e-12].
// Throws std::invalid_argument on an unfitted model.
Eigen::VectorXd predict_proba(const LogisticModel& model, const Eigen::MatrixXd& features);

}  // namespace ssmix
