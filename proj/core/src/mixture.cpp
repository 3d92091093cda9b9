#include "ssmix/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ssmix/error.hpp"

namespace ssmix {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// One mixture component with its covariance factored for repeated evaluation.
struct FactoredComponent {
  Eigen::VectorXd mean;
  Eigen::LLT<Eigen::MatrixXd> llt;
  double log_norm_const;  // -(d/2) log(2 pi) - 1/2 log det Sigma

  FactoredComponent(const Eigen::VectorXd& mu, const Eigen::MatrixXd& cov, int index)
      : mean(mu), llt(cov) {
    if (llt.info() != Eigen::Success) {
      throw NumericError("covariance matrix is not positive definite", index);
    }
    const auto& L = llt.matrixLLT();
    double half_log_det = 0.0;
    for (long i = 0; i < L.rows(); ++i) half_log_det += std::log(L(i, i));
    log_norm_const = -0.5 * static_cast<double>(mu.size()) * kLog2Pi - half_log_det;
  }

  double log_pdf(const Eigen::VectorXd& y) const {
    Eigen::VectorXd r = y - mean;
    llt.matrixL().solveInPlace(r);  // r <- L^{-1} (y - mean)
    return log_norm_const - 0.5 * r.squaredNorm();
  }
};

void check_symmetry(const Eigen::MatrixXd& cov, int index) {
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw NumericError("covariance matrix is not symmetric", index);
  }
}

}  // namespace

void MixtureParams::validate() const {
  const int k = num_components();
  if (k < 1) throw std::invalid_argument("mixture: at least one component required");
  if (weights.minCoeff() < 0.0) throw std::invalid_argument("mixture: negative weight");
  if (std::abs(weights.sum() - 1.0) > 1e-12) {
    throw std::invalid_argument("mixture: weights do not sum to 1");
  }
  if (static_cast<int>(means.size()) != k || static_cast<int>(covariances.size()) != k) {
    throw std::invalid_argument("mixture: component count mismatch");
  }
  const long d = dim();
  for (int i = 0; i < k; ++i) {
    if (means[i].size() != d || covariances[i].rows() != d || covariances[i].cols() != d) {
      throw std::invalid_argument("mixture: dimension mismatch at component " +
                                  std::to_string(i));
    }
    check_symmetry(covariances[i], i);
    Eigen::LLT<Eigen::MatrixXd> llt(covariances[i]);
    if (llt.info() != Eigen::Success) {
      throw NumericError("covariance matrix is not positive definite", i);
    }
  }
}

double gaussian_log_pdf(const Eigen::VectorXd& y, const Eigen::VectorXd& mean,
                        const Eigen::MatrixXd& cov, int component_index) {
  if (y.size() != mean.size() || cov.rows() != y.size() || cov.cols() != y.size()) {
    throw std::invalid_argument("gaussian_log_pdf: dimension mismatch");
  }
  check_symmetry(cov, component_index);
  return FactoredComponent(mean, cov, component_index).log_pdf(y);
}

Eigen::MatrixXd log_weighted_densities(const Eigen::MatrixXd& features,
                                       const MixtureParams& params) {
  const int k = params.num_components();
  const long n = features.rows();
  if (features.cols() != params.dim()) {
    throw std::invalid_argument("log_weighted_densities: feature dimension mismatch");
  }

  std::vector<FactoredComponent> comps;
  comps.reserve(k);
  for (int i = 0; i < k; ++i) {
    check_symmetry(params.covariances[i], i);
    comps.emplace_back(params.means[i], params.covariances[i], i);
  }

  Eigen::MatrixXd a(n, k);
  for (int i = 0; i < k; ++i) {
    const double log_pi = params.weights(i) > 0.0
                              ? std::log(params.weights(i))
                              : -std::numeric_limits<double>::infinity();
    for (long j = 0; j < n; ++j) {
      a(j, i) = log_pi + comps[i].log_pdf(features.row(j).transpose());
    }
  }
  return a;
}

Responsibilities responsibilities(const Eigen::MatrixXd& features,
                                  const MixtureParams& params) {
  Eigen::MatrixXd a = log_weighted_densities(features, params);
  const long n = a.rows();
  const int k = static_cast<int>(a.cols());

  Responsibilities out;
  out.tau.resize(n, k);
  for (long j = 0; j < n; ++j) {
    const double m = a.row(j).maxCoeff();
    if (!std::isfinite(m)) {
      throw NumericError("responsibilities: zero total density for row", j);
    }
    double denom = 0.0;
    for (int i = 0; i < k; ++i) {
      out.tau(j, i) = std::exp(a(j, i) - m);
      denom += out.tau(j, i);
    }
    out.tau.row(j) /= denom;
  }
  return out;
}

double margin_confidence(const Eigen::VectorXd& tau_row) {
  if (tau_row.size() < 2) {
    throw std::invalid_argument("margin_confidence: need at least two components");
  }
  if (std::abs(tau_row.sum() - 1.0) > 1e-8) {
    throw std::invalid_argument("margin_confidence: row is not a probability vector");
  }
  double top1 = -std::numeric_limits<double>::infinity();
  double top2 = top1;
  for (long i = 0; i < tau_row.size(); ++i) {
    const double v = tau_row(i);
    if (v > top1) {
      top2 = top1;
      top1 = v;
    } else if (v > top2) {
      top2 = v;
    }
  }
  return top1 - top2;
}

double shannon_entropy(const Eigen::VectorXd& tau_row) {
  double h = 0.0;
  for (long i = 0; i < tau_row.size(); ++i) {
    const double p = tau_row(i);
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double entropy_quadratic_approx(double delta) {
  if (delta < 0.0 || delta > 1.0) {
    throw std::invalid_argument("entropy_quadratic_approx: delta outside [0, 1]");
  }
  return std::numbers::ln2 - 0.5 * delta * delta;
}

UncertaintyProfile uncertainty_profile(const Responsibilities& resp) {
  const long n = resp.n();
  UncertaintyProfile prof;
  prof.delta.resize(n);
  prof.delta_sq.resize(n);
  prof.entropy.resize(n);
  for (long j = 0; j < n; ++j) {
    const Eigen::VectorXd row = resp.tau.row(j).transpose();
    const double d = margin_confidence(row);
    prof.delta(j) = d;
    prof.delta_sq(j) = d * d;
    prof.entropy(j) = shannon_entropy(row);
  }
  return prof;
}

std::vector<int> bayes_classify(const Eigen::MatrixXd& features, const MixtureParams& params) {
  const Responsibilities resp = responsibilities(features, params);
  std::vector<int> labels(resp.n());
  for (long j = 0; j < resp.n(); ++j) {
    int best = 0;
    for (int i = 1; i < resp.tau.cols(); ++i) {
      if (resp.tau(j, i) > resp.tau(j, best)) best = i;
    }
    labels[j] = best + 1;
  }
  return labels;
}

double loglik_ignorable(const Dataset& dataset, const MixtureParams& params) {
  const Eigen::MatrixXd a = log_weighted_densities(dataset.features, params);
  const int k = params.num_components();
  double total = 0.0;
  for (long j = 0; j < dataset.n(); ++j) {
    if (dataset.missing_flags[j] == 0) {
      const int z = dataset.observed_labels[j];
      if (z < 1 || z > k) {
        throw std::invalid_argument("loglik_ignorable: label out of range at row " +
                                    std::to_string(j));
      }
      total += a(j, z - 1);
    } else {
      const double m = a.row(j).maxCoeff();
      if (!std::isfinite(m)) {
        throw NumericError("loglik_ignorable: zero mixture density at row", j);
      }
      double s = 0.0;
      for (int i = 0; i < k; ++i) s += std::exp(a(j, i) - m);
      total += m + std::log(s);
    }
  }
  return total;
}

}  // namespace ssmix
