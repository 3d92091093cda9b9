#include "ssmix/logistic.hpp"

#include <cmath>
#include <stdexcept>

#include "ssmix/error.hpp"
#include "ssmix/missingness.hpp"

namespace ssmix {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double deviance(const Eigen::VectorXd& linear, const std::vector<int>& y) {
  double ll = 0.0;
  for (long j = 0; j < linear.size(); ++j) {
    // log sigma(z) = -log(1 + e^{-z}), numerically via the positive branch
    const double z = y[j] ? linear(j) : -linear(j);
    ll -= z > 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
  }
  return -2.0 * ll;
}

}  // namespace

LogisticModel fit_irls(const Eigen::MatrixXd& features, const std::vector<int>& labels01,
                       const LogisticConfig& config) {
  const long n = features.rows();
  const long d = features.cols();
  if (static_cast<long>(labels01.size()) != n) {
    throw std::invalid_argument("fit_irls: label count mismatch");
  }
  if (n < d + 1) {
    throw std::invalid_argument("fit_irls: need at least d+1 rows");
  }
  long positives = 0;
  for (int y : labels01) positives += (y != 0);
  if (positives == 0 || positives == n) {
    throw std::invalid_argument("fit_irls: both classes must be present");
  }

  Eigen::MatrixXd design(n, d + 1);
  design.col(0).setOnes();
  design.rightCols(d) = features;

  LogisticModel model;
  model.coefficients = Eigen::VectorXd::Zero(d + 1);
  model.n_train = n;

  Eigen::VectorXd linear = design * model.coefficients;
  double dev = deviance(linear, labels01);

  for (int it = 0; it < config.max_iters; ++it) {
    Eigen::VectorXd p(n), w(n);
    for (long j = 0; j < n; ++j) {
      p(j) = sigmoid(linear(j));
      w(j) = p(j) * (1.0 - p(j));
    }
    Eigen::VectorXd residual(n);
    for (long j = 0; j < n; ++j) residual(j) = labels01[j] - p(j);
    const Eigen::VectorXd score = design.transpose() * residual;
    if (score.norm() <= config.grad_tol) break;

    Eigen::MatrixXd normal = design.transpose() * w.asDiagonal() * design;
    normal.diagonal().array() += config.ridge;
    const Eigen::VectorXd delta = normal.ldlt().solve(score);

    // step halving keeps the deviance non-increasing
    double step = 1.0;
    Eigen::VectorXd beta_new;
    double dev_new = dev;
    bool moved = false;
    for (int half = 0; half < 40; ++half) {
      beta_new = model.coefficients + step * delta;
      const Eigen::VectorXd lin_new = design * beta_new;
      dev_new = deviance(lin_new, labels01);
      if (dev_new <= dev) {
        model.coefficients = beta_new;
        linear = lin_new;
        dev = dev_new;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
    if (model.coefficients.cwiseAbs().maxCoeff() > config.separation_cap) {
      model.separation_flag = true;
      break;
    }
  }
  model.fitted = true;
  return model;
}

Eigen::VectorXd predict_proba(const LogisticModel& model, const Eigen::MatrixXd& features) {
  if (!model.fitted) throw std::invalid_argument("predict_proba: model is not fitted");
  if (features.cols() + 1 != model.coefficients.size()) {
    throw std::invalid_argument("predict_proba: feature dimension mismatch");
  }
  Eigen::VectorXd p(features.rows());
  for (long j = 0; j < features.rows(); ++j) {
    const double z = model.coefficients(0) + features.row(j).dot(model.coefficients.tail(features.cols()));
    double v = sigmoid(z);
    if (v < kProbClamp) v = kProbClamp;
    if (v > 1.0 - kProbClamp) v = 1.0 - kProbClamp;
    p(j) = v;
  }
  return p;
}

}  // namespace ssmix
