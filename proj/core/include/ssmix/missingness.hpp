#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace ssmix {

// Probabilities produced by the inverse links are clamped to this open
// interval so downstream logs stay finite. The clamp lives here, in the
// links, and nowhere else.
inline constexpr double kProbClamp = 1e-12;

// Aranda-Ordaz missingness parameters: P(missing) = inv_link(alpha0 + alpha1 * delta^2).
// lambda = 1 recovers the logistic link, lambda = 0 the complementary log-log limit.
struct AoParams {
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  double lambda = 1.0;  // >= 0

  void validate() const;
};

// Plain logit missingness parameters (the lambda = 1 special case).
struct LogitParams {
  double xi0 = 0.0;
  double xi1 = 0.0;

  void validate() const;
};

// Inverse Aranda-Ordaz link: lambda > 0 gives 1 - (1 + lambda e^eta)^(-1/lambda),
// lambda = 0 gives 1 - exp(-e^eta). Result clamped to [kProbClamp, 1 - kProbClamp].
double ao_inverse_link(double eta, double lambda);

// Forward link, the inverse of ao_inverse_link on the open unit interval.
// Throws std::invalid_argument for q outside (0, 1).
double ao_forward_link(double q, double lambda);

double missing_prob_ao(double delta_sq, const AoParams& params);
double missing_prob_logit(double delta_sq, const LogitParams& params);

Eigen::VectorXd missing_prob_ao(const Eigen::VectorXd& delta_sq, const AoParams& params);

// sum_j (1 - m_j) log(1 - q_j) + m_j log q_j.
double missingness_loglik(const std::vector<std::uint8_t>& missing_flags,
                          const Eigen::VectorXd& q);

struct MissingnessScore {
  Eigen::Vector3d gradient;  // d loglik / d (alpha0, alpha1, lambda)
  Eigen::Matrix3d hessian;   // symmetric
};

// Analytic first derivatives in (alpha0, alpha1); lambda derivatives by
// central finite differences with step 1e-6 * max(1, |lambda|).
// Throws NumericError naming the row on non-finite intermediates.
MissingnessScore missingness_score_and_hessian(const std::vector<std::uint8_t>& missing_flags,
                                               const Eigen::VectorXd& delta_sq,
                                               const AoParams& params);

// Finds alpha0 such that mean_j missing_prob_ao(delta_sq_j; alpha0, slope, lambda)
// equals target_rate within 1e-6, by bisection over [-30, 30]. Throws
// NumericError when the target lies outside the achievable range.
double calibrate_intercept(const Eigen::VectorXd& delta_sq, double slope, double lambda,
                           double target_rate);

}  // namespace ssmix
