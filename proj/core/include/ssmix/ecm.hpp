#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "ssmix/dataset.hpp"
#include "ssmix/missingness.hpp"
#include "ssmix/mixture.hpp"

namespace ssmix {

enum class LinkKind { ao, logit };

// Joint parameter set: mixture parameters plus the missingness mechanism.
struct FullParams {
  MixtureParams theta;
  std::variant<AoParams, LogitParams> missingness;

  // Canonical Aranda-Ordaz view (logit maps to lambda = 1).
  AoParams ao() const;

  void validate() const;
};

struct EcmConfig {
  int max_iters = 500;
  double rel_tol = 1e-8;  // on |delta loglik| / (1 + |loglik|)
  double ridge = 1e-6;    // covariance regularizer, times trace/d
  LinkKind link = LinkKind::ao;
  bool lambda_estimated = true;  // only meaningful for the AO link
  double lambda_fixed = 1.0;
  std::pair<double, double> lambda_grid{1e-3, 5.0};
  std::uint64_t seed = 0;  // k-means initialization

  void validate() const;
};

struct FitReport {
  std::vector<double> loglik_trace;  // full log-likelihood, element 0 = initial value
  int iterations = 0;
  bool converged = false;
  FullParams final_params;
  Responsibilities final_responsibilities;  // E-step output at the final parameters
  int covariance_ridges = 0;                // times the SPD repair ridge was applied
  int theta_step_rejections = 0;            // CM-step 1 line searches that made no progress
};

struct EStepResult {
  // Model-based posteriors, with labeled rows overwritten by their one-hot
  // label (the weights CM-step 1 moment computations would use).
  Responsibilities tau;
  // delta is always computed from the model-based posteriors, labeled or not.
  UncertaintyProfile uncertainty;
  Eigen::VectorXd q;  // per-row missing probability at the current parameters
};

// Eq-level building block: ignorable log-likelihood plus the missingness
// term with q evaluated at delta^2(theta).
double full_loglik(const Dataset& dataset, const FullParams& params);

// Moment-based start: labeled per-class moments when every class has at
// least d+1 labeled rows, otherwise seeded k-means (10 restarts) moments.
// The missingness mechanism starts flat at the observed missing fraction.
FullParams initialize(const Dataset& dataset, const EcmConfig& config);

EStepResult e_step(const Dataset& dataset, const FullParams& params);

// Quasi-Newton ascent of the full log-likelihood in theta alone, over the
// unconstrained parameterization (weight logit, raw means, Cholesky factors
// with log diagonal). Never returns a theta that lowers the objective; when
// the first line search fails the input theta is returned and
// *line_search_failed is set.
MixtureParams cm_step_theta(const Dataset& dataset, const FullParams& current,
                            const EcmConfig& config, bool* line_search_failed = nullptr);

// Newton with step halving on (alpha0, alpha1) at frozen delta^2, with an
// optional golden-section profile search for lambda (AO link only).
// Guaranteed not to lower the missingness log-likelihood at the given
// delta^2.
std::variant<AoParams, LogitParams> cm_step_missingness(
    const std::vector<std::uint8_t>& missing_flags, const Eigen::VectorXd& delta_sq,
    const std::variant<AoParams, LogitParams>& current, const EcmConfig& config);

// Full ECM loop; the trace in the report is non-decreasing up to
// 1e-8 * (1 + |value|) per step.
std::pair<FullParams, FitReport> fit(const Dataset& dataset, const EcmConfig& config);

// Same loop from an explicit starting point instead of initialize().
std::pair<FullParams, FitReport> fit_from(const Dataset& dataset, const EcmConfig& config,
                                          const FullParams& initial);

// Observed labels pass through; missing ones come from the Bayes allocation
// under the fitted mixture.
std::vector<int> impute_labels(const Dataset& dataset, const FullParams& fitted);

// Gradient of the CM-step 1 objective in the unconstrained parameterization;
// exposed so tests can check it against finite differences.
Eigen::VectorXd cm_step_theta_gradient(const Dataset& dataset, const FullParams& params);

// Pack/unpack between MixtureParams and the unconstrained vector used by
// CM-step 1 (K = 2 only).
Eigen::VectorXd pack_theta(const MixtureParams& theta);
MixtureParams unpack_theta(const Eigen::VectorXd& v, long dim);

}  // namespace ssmix
