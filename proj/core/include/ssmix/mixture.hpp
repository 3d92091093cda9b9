#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ssmix/dataset.hpp"

namespace ssmix {

// Parameters of a K-component Gaussian mixture (K = 2 in all experiments,
// but nothing here hard-codes it).
struct MixtureParams {
  Eigen::VectorXd weights;                   // K, nonnegative, sums to 1
  std::vector<Eigen::VectorXd> means;        // K vectors of dimension d
  std::vector<Eigen::MatrixXd> covariances;  // K symmetric positive-definite d x d

  int num_components() const { return static_cast<int>(weights.size()); }
  long dim() const { return means.empty() ? 0 : means.front().size(); }

  // Checks the structural invariants: weights form a probability vector
  // (within 1e-12), covariances are symmetric SPD, dimensions agree.
  // Throws std::invalid_argument or NumericError.
  void validate() const;
};

// Posterior component-membership probabilities, one row per observation.
struct Responsibilities {
  Eigen::MatrixXd tau;  // n x K, rows sum to 1

  long n() const { return tau.rows(); }
};

// Margin confidence, its square, and Shannon entropy per observation.
struct UncertaintyProfile {
  Eigen::VectorXd delta;     // in [0, 1]
  Eigen::VectorXd delta_sq;  // delta^2, elementwise
  Eigen::VectorXd entropy;   // in [0, log K]
};

// log N(y; mean, cov) via Cholesky factorization. component_index is only
// used to label the error when cov is not SPD.
double gaussian_log_pdf(const Eigen::VectorXd& y, const Eigen::VectorXd& mean,
                        const Eigen::MatrixXd& cov, int component_index = -1);

// n x K matrix with entries log(pi_k) + log N(y_j; mu_k, Sigma_k).
// Covariances are factored once per call.
Eigen::MatrixXd log_weighted_densities(const Eigen::MatrixXd& features,
                                       const MixtureParams& params);

// Posterior responsibilities, computed in log space with max-subtraction.
// Throws NumericError with the row index if a row has zero total density.
Responsibilities responsibilities(const Eigen::MatrixXd& features,
                                  const MixtureParams& params);

// Difference of the two largest entries of a probability row (K >= 2).
// For K = 2 this equals |2 tau[0] - 1|.
double margin_confidence(const Eigen::VectorXd& tau_row);

// -sum tau_k log tau_k with 0 log 0 := 0 (natural log).
double shannon_entropy(const Eigen::VectorXd& tau_row);

// Second-order approximation log 2 - delta^2 / 2, valid for two components.
double entropy_quadratic_approx(double delta);

// delta, delta^2 and entropy for every row of tau.
UncertaintyProfile uncertainty_profile(const Responsibilities& resp);

// Maximum-responsibility allocation; ties broken toward the lowest
// component index. Labels are 1-based.
std::vector<int> bayes_classify(const Eigen::MatrixXd& features, const MixtureParams& params);

// Observed-data log-likelihood that ignores the missingness mechanism:
// labeled rows contribute log(pi_z N_z), unlabeled rows the log mixture
// density. Throws on out-of-range labels.
double loglik_ignorable(const Dataset& dataset, const MixtureParams& params);

}  // namespace ssmix
