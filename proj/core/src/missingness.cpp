#include "ssmix/missingness.hpp"

#include <cmath>
#include <stdexcept>

#include "ssmix/error.hpp"

namespace ssmix {

namespace {

double clamp_prob(double q) {
  if (q < kProbClamp) return kProbClamp;
  if (q > 1.0 - kProbClamp) return 1.0 - kProbClamp;
  return q;
}

// e^eta / (1 + lambda e^eta), stable for large eta (lambda > 0).
double exp_over_s(double eta, double lambda) {
  if (eta + std::log(lambda) > 35.0) return 1.0 / lambda;
  const double e = std::exp(eta);
  return e / (1.0 + lambda * e);
}

// dq/deta of the inverse link (unclamped q passed in).
double link_derivative(double eta, double lambda, double one_minus_q) {
  if (lambda == 0.0) return std::exp(eta - std::exp(eta));
  return one_minus_q * exp_over_s(eta, lambda);
}

// d2q/deta2 expressed through the first derivative.
double link_second_derivative(double eta, double lambda, double dq) {
  if (dq == 0.0) return 0.0;
  if (lambda == 0.0) return dq * (1.0 - std::exp(eta));
  return dq * (1.0 - (1.0 + lambda) * exp_over_s(eta, lambda));
}

}  // namespace

void AoParams::validate() const {
  if (!std::isfinite(alpha0) || !std::isfinite(alpha1)) {
    throw std::invalid_argument("AoParams: non-finite coefficient");
  }
  if (!(lambda >= 0.0) || lambda > 10.0) {
    throw std::invalid_argument("AoParams: lambda outside [0, 10]");
  }
}

void LogitParams::validate() const {
  if (!std::isfinite(xi0) || !std::isfinite(xi1)) {
    throw std::invalid_argument("LogitParams: non-finite coefficient");
  }
}

double ao_inverse_link(double eta, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("ao_inverse_link: lambda must be >= 0");
  double q;
  if (lambda == 0.0) {
    q = -std::expm1(-std::exp(eta));
  } else {
    const double log_lam_e = eta + std::log(lambda);
    const double t = log_lam_e > 35.0 ? log_lam_e : std::log1p(lambda * std::exp(eta));
    q = -std::expm1(-t / lambda);
  }
  return clamp_prob(q);
}

double ao_forward_link(double q, double lambda) {
  if (!(q > 0.0) || !(q < 1.0)) {
    throw std::invalid_argument("ao_forward_link: q outside (0, 1)");
  }
  if (!(lambda >= 0.0)) throw std::invalid_argument("ao_forward_link: lambda must be >= 0");
  if (lambda == 0.0) {
    return std::log(-std::log1p(-q));
  }
  return std::log(std::expm1(-lambda * std::log1p(-q))) - std::log(lambda);
}

double missing_prob_ao(double delta_sq, const AoParams& params) {
  return ao_inverse_link(params.alpha0 + params.alpha1 * delta_sq, params.lambda);
}

double missing_prob_logit(double delta_sq, const LogitParams& params) {
  const double eta = params.xi0 + params.xi1 * delta_sq;
  // logistic written through the same stable expm1/log1p route as the
  // lambda = 1 branch of the AO family
  return clamp_prob(-std::expm1(-std::log1p(std::exp(eta))));
}

Eigen::VectorXd missing_prob_ao(const Eigen::VectorXd& delta_sq, const AoParams& params) {
  Eigen::VectorXd q(delta_sq.size());
  for (long j = 0; j < delta_sq.size(); ++j) q(j) = missing_prob_ao(delta_sq(j), params);
  return q;
}

double missingness_loglik(const std::vector<std::uint8_t>& missing_flags,
                          const Eigen::VectorXd& q) {
  if (static_cast<long>(missing_flags.size()) != q.size()) {
    throw std::invalid_argument("missingness_loglik: size mismatch");
  }
  double total = 0.0;
  for (long j = 0; j < q.size(); ++j) {
    total += missing_flags[j] ? std::log(q(j)) : std::log1p(-q(j));
  }
  return total;
}

namespace {

// Gradient of the missingness log-likelihood in (alpha0, alpha1) at fixed lambda.
Eigen::Vector2d alpha_gradient(const std::vector<std::uint8_t>& m,
                               const Eigen::VectorXd& x, const AoParams& p) {
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  for (long j = 0; j < x.size(); ++j) {
    const double eta = p.alpha0 + p.alpha1 * x(j);
    const double q = ao_inverse_link(eta, p.lambda);
    const double dq = link_derivative(eta, p.lambda, 1.0 - q);
    const double a = (m[j] - q) / (q * (1.0 - q)) * dq;
    if (!std::isfinite(a)) {
      throw NumericError("missingness score: non-finite term at row", j);
    }
    g(0) += a;
    g(1) += a * x(j);
  }
  return g;
}

double loglik_at(const std::vector<std::uint8_t>& m, const Eigen::VectorXd& x,
                 const AoParams& p) {
  return missingness_loglik(m, missing_prob_ao(x, p));
}

}  // namespace

MissingnessScore missingness_score_and_hessian(const std::vector<std::uint8_t>& missing_flags,
                                               const Eigen::VectorXd& delta_sq,
                                               const AoParams& params) {
  params.validate();
  if (static_cast<long>(missing_flags.size()) != delta_sq.size()) {
    throw std::invalid_argument("missingness score: size mismatch");
  }

  MissingnessScore out;
  out.gradient.setZero();
  out.hessian.setZero();

  for (long j = 0; j < delta_sq.size(); ++j) {
    const double x = delta_sq(j);
    const double eta = params.alpha0 + params.alpha1 * x;
    const double q = ao_inverse_link(eta, params.lambda);
    const double pq = q * (1.0 - q);
    const double dq = link_derivative(eta, params.lambda, 1.0 - q);
    const double d2q = link_second_derivative(eta, params.lambda, dq);
    const double resid = (missing_flags[j] - q) / pq;
    const double a = resid * dq;
    const double u = dq / pq;
    const double du = (d2q * pq - dq * dq * (1.0 - 2.0 * q)) / (pq * pq);
    const double b = -dq * u + (missing_flags[j] - q) * du;
    if (!std::isfinite(a) || !std::isfinite(b)) {
      throw NumericError("missingness score: non-finite term at row", j);
    }
    out.gradient(0) += a;
    out.gradient(1) += a * x;
    out.hessian(0, 0) += b;
    out.hessian(0, 1) += b * x;
    out.hessian(1, 1) += b * x * x;
  }
  out.hessian(1, 0) = out.hessian(0, 1);

  // lambda derivatives by finite differences; one-sided when lambda < step
  // to stay inside the lambda >= 0 domain.
  const double h = 1e-6 * std::max(1.0, std::abs(params.lambda));
  AoParams plus = params, minus = params;
  plus.lambda += h;
  const double ll_mid = loglik_at(missing_flags, delta_sq, params);
  const double ll_plus = loglik_at(missing_flags, delta_sq, plus);
  Eigen::Vector2d g_plus = alpha_gradient(missing_flags, delta_sq, plus);
  if (params.lambda >= h) {
    minus.lambda -= h;
    const double ll_minus = loglik_at(missing_flags, delta_sq, minus);
    const Eigen::Vector2d g_minus = alpha_gradient(missing_flags, delta_sq, minus);
    out.gradient(2) = (ll_plus - ll_minus) / (2.0 * h);
    out.hessian(2, 2) = (ll_plus - 2.0 * ll_mid + ll_minus) / (h * h);
    out.hessian(0, 2) = (g_plus(0) - g_minus(0)) / (2.0 * h);
    out.hessian(1, 2) = (g_plus(1) - g_minus(1)) / (2.0 * h);
  } else {
    AoParams plus2 = params;
    plus2.lambda += 2.0 * h;
    const double ll_plus2 = loglik_at(missing_flags, delta_sq, plus2);
    const Eigen::Vector2d g_mid = alpha_gradient(missing_flags, delta_sq, params);
    out.gradient(2) = (ll_plus - ll_mid) / h;
    out.hessian(2, 2) = (ll_plus2 - 2.0 * ll_plus + ll_mid) / (h * h);
    out.hessian(0, 2) = (g_plus(0) - g_mid(0)) / h;
    out.hessian(1, 2) = (g_plus(1) - g_mid(1)) / h;
  }
  out.hessian(2, 0) = out.hessian(0, 2);
  out.hessian(2, 1) = out.hessian(1, 2);
  return out;
}

double calibrate_intercept(const Eigen::VectorXd& delta_sq, double slope, double lambda,
                           double target_rate) {
  if (!(target_rate > 0.01) || !(target_rate < 0.99)) {
    throw std::invalid_argument("calibrate_intercept: target rate outside (0.01, 0.99)");
  }
  const auto mean_q = [&](double a0) {
    AoParams p{a0, slope, lambda};
    return missing_prob_ao(delta_sq, p).mean();
  };

  double lo = -30.0, hi = 30.0;
  const double q_lo = mean_q(lo), q_hi = mean_q(hi);
  if (target_rate < q_lo || target_rate > q_hi) {
    throw NumericError("calibrate_intercept: target rate " + std::to_string(target_rate) +
                       " outside achievable range [" + std::to_string(q_lo) + ", " +
                       std::to_string(q_hi) + "]");
  }
  double mid = 0.0;
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double q = mean_q(mid);
    if (std::abs(q - target_rate) <= 1e-6 && it > 20) break;
    (q < target_rate ? lo : hi) = mid;
  }
  if (std::abs(mean_q(mid) - target_rate) > 1e-6) {
    throw NumericError("calibrate_intercept: bisection failed to reach target");
  }
  return mid;
}

}  // namespace ssmix
