#include "ssmix/ecm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "ssmix/error.hpp"
#include "ssmix/optim.hpp"

namespace ssmix {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr int kComponents = 2;

double sigmoid(double w) { return 1.0 / (1.0 + std::exp(-w)); }

// dq/deta of the AO inverse link (q passed in clamped form).
double link_derivative(double eta, double lambda, double one_minus_q) {
  if (lambda == 0.0) return std::exp(eta - std::exp(eta));
  if (eta + std::log(lambda) > 35.0) return one_minus_q / lambda;
  const double e = std::exp(eta);
  return one_minus_q * e / (1.0 + lambda * e);
}

}  // namespace

AoParams FullParams::ao() const {
  if (std::holds_alternative<AoParams>(missingness)) return std::get<AoParams>(missingness);
  const auto& l = std::get<LogitParams>(missingness);
  return AoParams{l.xi0, l.xi1, 1.0};
}

void FullParams::validate() const {
  theta.validate();
  std::visit([](const auto& p) { p.validate(); }, missingness);
}

void EcmConfig::validate() const {
  if (max_iters < 1) throw std::invalid_argument("ecm config: max_iters must be >= 1");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("ecm config: rel_tol must be positive");
  if (ridge < 0.0) throw std::invalid_argument("ecm config: ridge must be nonnegative");
  if (!(lambda_grid.first > 0.0) || !(lambda_grid.second > lambda_grid.first)) {
    throw std::invalid_argument("ecm config: lambda grid must be a nonempty positive interval");
  }
  if (lambda_fixed < 0.0 || lambda_fixed > 10.0) {
    throw std::invalid_argument("ecm config: fixed lambda outside [0, 10]");
  }
}

double full_loglik(const Dataset& dataset, const FullParams& params) {
  const Eigen::MatrixXd a = log_weighted_densities(dataset.features, params.theta);
  const AoParams mech = params.ao();
  const int k = params.theta.num_components();
  if (k != kComponents) {
    throw std::invalid_argument("full_loglik: margin confidence requires two components");
  }

  double total = 0.0;
  for (long j = 0; j < dataset.n(); ++j) {
    // ignorable part
    const double m = a.row(j).maxCoeff();
    if (!std::isfinite(m)) {
      throw NumericError("full_loglik: zero mixture density at row", j);
    }
    double denom = 0.0;
    for (int i = 0; i < k; ++i) denom += std::exp(a(j, i) - m);
    if (dataset.missing_flags[j] == 0) {
      const int z = dataset.observed_labels[j];
      if (z < 1 || z > k) {
        throw std::invalid_argument("full_loglik: label out of range at row " +
                                    std::to_string(j));
      }
      total += a(j, z - 1);
    } else {
      total += m + std::log(denom);
    }
    // missingness part at delta^2(theta), model-based for every row
    const double tau1 = std::exp(a(j, 0) - m) / denom;
    const double margin = 2.0 * tau1 - 1.0;
    const double q = missing_prob_ao(margin * margin, mech);
    total += dataset.missing_flags[j] ? std::log(q) : std::log1p(-q);
  }
  return total;
}

// ---------------------------------------------------------------------------
// CM-step 1: unconstrained parameterization and analytic gradient
// ---------------------------------------------------------------------------

Eigen::VectorXd pack_theta(const MixtureParams& theta) {
  if (theta.num_components() != kComponents) {
    throw std::invalid_argument("pack_theta: exactly two components supported");
  }
  const long d = theta.dim();
  const long chol = d * (d + 1) / 2;
  Eigen::VectorXd v(1 + 2 * d + 2 * chol);
  const double p1 = theta.weights(0);
  v(0) = std::log(p1 / (1.0 - p1));
  v.segment(1, d) = theta.means[0];
  v.segment(1 + d, d) = theta.means[1];
  long pos = 1 + 2 * d;
  for (int comp = 0; comp < 2; ++comp) {
    Eigen::LLT<Eigen::MatrixXd> llt(theta.covariances[comp]);
    if (llt.info() != Eigen::Success) {
      throw NumericError("pack_theta: covariance not positive definite", comp);
    }
    const Eigen::MatrixXd L = llt.matrixL();
    for (long i = 0; i < d; ++i) {
      for (long c = 0; c < i; ++c) v(pos++) = L(i, c);
      v(pos++) = std::log(L(i, i));
    }
  }
  return v;
}

MixtureParams unpack_theta(const Eigen::VectorXd& v, long d) {
  const long chol = d * (d + 1) / 2;
  if (v.size() != 1 + 2 * d + 2 * chol) {
    throw std::invalid_argument("unpack_theta: size mismatch");
  }
  MixtureParams theta;
  theta.weights.resize(2);
  const double p1 = sigmoid(v(0));
  theta.weights << p1, 1.0 - p1;
  theta.means = {v.segment(1, d), v.segment(1 + d, d)};
  theta.covariances.resize(2);
  long pos = 1 + 2 * d;
  for (int comp = 0; comp < 2; ++comp) {
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(d, d);
    for (long i = 0; i < d; ++i) {
      for (long c = 0; c < i; ++c) L(i, c) = v(pos++);
      L(i, i) = std::exp(v(pos++));
    }
    theta.covariances[comp] = L * L.transpose();
  }
  return theta;
}

namespace {

// Per-component factor state reused across the rows of one gradient pass.
struct CompState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd L;       // lower Cholesky factor
  Eigen::MatrixXd L_inv_t; // L^{-T}
  double log_pi;
  double log_norm;  // -(d/2) log 2pi - sum log L_ii
};

}  // namespace

Eigen::VectorXd cm_step_theta_gradient(const Dataset& dataset, const FullParams& params) {
  const long d = params.theta.dim();
  const long n = dataset.n();
  const long chol = d * (d + 1) / 2;
  const AoParams mech = params.ao();

  std::array<CompState, 2> comp;
  for (int c = 0; c < 2; ++c) {
    comp[c].mean = params.theta.means[c];
    Eigen::LLT<Eigen::MatrixXd> llt(params.theta.covariances[c]);
    if (llt.info() != Eigen::Success) {
      throw NumericError("cm_step_theta_gradient: covariance not positive definite", c);
    }
    comp[c].L = llt.matrixL();
    comp[c].L_inv_t =
        comp[c].L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(d, d))
            .transpose();
    comp[c].log_pi = std::log(params.theta.weights(c));
    double sum_log_diag = 0.0;
    for (long i = 0; i < d; ++i) sum_log_diag += std::log(comp[c].L(i, i));
    comp[c].log_norm = -0.5 * d * kLog2Pi - sum_log_diag;
  }
  const double pi1 = params.theta.weights(0);

  double grad_w = 0.0;
  std::array<Eigen::VectorXd, 2> grad_mean{Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
  std::array<Eigen::MatrixXd, 2> bz_sum{Eigen::MatrixXd::Zero(d, d),
                                        Eigen::MatrixXd::Zero(d, d)};
  std::array<double, 2> coef_sum{0.0, 0.0};

  Eigen::VectorXd z0(d), z1(d), b0(d), b1(d);
  for (long j = 0; j < n; ++j) {
    const Eigen::VectorXd y = dataset.features.row(j).transpose();

    z0 = y - comp[0].mean;
    comp[0].L.triangularView<Eigen::Lower>().solveInPlace(z0);
    z1 = y - comp[1].mean;
    comp[1].L.triangularView<Eigen::Lower>().solveInPlace(z1);
    const double a0 = comp[0].log_pi + comp[0].log_norm - 0.5 * z0.squaredNorm();
    const double a1 = comp[1].log_pi + comp[1].log_norm - 0.5 * z1.squaredNorm();
    const double tau1 = sigmoid(a0 - a1);
    const double tau2 = 1.0 - tau1;

    b0 = comp[0].L_inv_t * z0;  // Sigma^{-1} (y - mu)
    b1 = comp[1].L_inv_t * z1;

    // ignorable-likelihood coefficients
    double coef0, coef1;
    if (dataset.missing_flags[j] == 0) {
      coef0 = dataset.observed_labels[j] == 1 ? 1.0 : 0.0;
      coef1 = 1.0 - coef0;
    } else {
      coef0 = tau1;
      coef1 = tau2;
    }

    // missingness chain through delta^2 = (2 tau1 - 1)^2
    const double margin = 2.0 * tau1 - 1.0;
    const double dsq = margin * margin;
    const double eta = mech.alpha0 + mech.alpha1 * dsq;
    const double q = ao_inverse_link(eta, mech.lambda);
    const double dq = link_derivative(eta, mech.lambda, 1.0 - q);
    const double resid = (dataset.missing_flags[j] - q) / (q * (1.0 - q));
    const double dll_ddsq = resid * dq * mech.alpha1;
    const double ddsq_du = 4.0 * margin * tau1 * tau2;  // u = a0 - a1
    const double chain = dll_ddsq * ddsq_du;
    coef0 += chain;
    coef1 -= chain;

    grad_w += coef0 * (1.0 - pi1) - coef1 * pi1;
    grad_mean[0] += coef0 * b0;
    grad_mean[1] += coef1 * b1;
    bz_sum[0] += coef0 * b0 * z0.transpose();
    bz_sum[1] += coef1 * b1 * z1.transpose();
    coef_sum[0] += coef0;
    coef_sum[1] += coef1;
  }

  Eigen::VectorXd g(1 + 2 * d + 2 * chol);
  g(0) = grad_w;
  g.segment(1, d) = grad_mean[0];
  g.segment(1 + d, d) = grad_mean[1];
  long pos = 1 + 2 * d;
  for (int c = 0; c < 2; ++c) {
    const Eigen::MatrixXd G = bz_sum[c] - coef_sum[c] * comp[c].L_inv_t;
    for (long i = 0; i < d; ++i) {
      for (long col = 0; col < i; ++col) g(pos++) = G(i, col);
      g(pos++) = G(i, i) * comp[c].L(i, i);  // chain through log-diagonal
    }
  }
  return g;
}

MixtureParams cm_step_theta(const Dataset& dataset, const FullParams& current,
                            [[maybe_unused]] const EcmConfig& config,
                            bool* line_search_failed) {
  const long d = current.theta.dim();
  const AoParams mech = current.ao();

  const auto objective = [&](const Eigen::VectorXd& v) -> double {
    try {
      FullParams p{unpack_theta(v, d), mech};
      return full_loglik(dataset, p);
    } catch (const NumericError&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  const auto gradient = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    FullParams p{unpack_theta(v, d), mech};
    return cm_step_theta_gradient(dataset, p);
  };

  BfgsOptions opts;
  opts.max_iters = 25;
  opts.max_backtracks = 40;
  const BfgsResult res = bfgs_maximize(objective, gradient, pack_theta(current.theta), opts);
  if (line_search_failed) *line_search_failed = res.line_search_failed;
  if (res.line_search_failed) return current.theta;  // GEM: keep the current point
  return unpack_theta(res.x, d);
}

// ---------------------------------------------------------------------------
// Initialization
// ---------------------------------------------------------------------------

namespace {

Eigen::MatrixXd ridge_spd(Eigen::MatrixXd cov, double ridge, int* repairs = nullptr) {
  const long d = cov.rows();
  double scale = cov.trace() / static_cast<double>(d);
  if (!(scale > 0.0)) scale = 1.0;
  cov.diagonal().array() += ridge * scale;
  double bump = ridge * scale;
  for (int attempt = 0; attempt < 60; ++attempt) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success) return cov;
    bump = std::max(bump * 10.0, 1e-12 * scale);
    cov.diagonal().array() += bump;
    if (repairs) ++(*repairs);
  }
  throw NumericError("initialize: could not regularize covariance to SPD");
}

struct KmeansResult {
  std::vector<int> assign;
  Eigen::MatrixXd centers;
  double inertia = std::numeric_limits<double>::infinity();
};

KmeansResult kmeans_two(const Eigen::MatrixXd& x, std::uint64_t seed, int restarts) {
  const long n = x.rows();
  const long d = x.cols();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  KmeansResult best;
  for (int r = 0; r < restarts; ++r) {
    // k-means++ seeding
    Eigen::MatrixXd centers(2, d);
    const long first = static_cast<long>(unif(rng) * n) % n;
    centers.row(0) = x.row(first);
    Eigen::VectorXd dist2(n);
    for (long j = 0; j < n; ++j) dist2(j) = (x.row(j) - centers.row(0)).squaredNorm();
    const double total = dist2.sum();
    long second = n - 1;
    if (total > 0.0) {
      double target = unif(rng) * total;
      for (long j = 0; j < n; ++j) {
        target -= dist2(j);
        if (target <= 0.0) {
          second = j;
          break;
        }
      }
    }
    centers.row(1) = x.row(second);

    std::vector<int> assign(n, 0);
    for (int it = 0; it < 100; ++it) {
      bool changed = false;
      for (long j = 0; j < n; ++j) {
        const double d0 = (x.row(j) - centers.row(0)).squaredNorm();
        const double d1 = (x.row(j) - centers.row(1)).squaredNorm();
        const int a = d1 < d0 ? 1 : 0;
        if (a != assign[j]) {
          assign[j] = a;
          changed = true;
        }
      }
      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(2, d);
      std::array<long, 2> counts{0, 0};
      for (long j = 0; j < n; ++j) {
        sums.row(assign[j]) += x.row(j);
        ++counts[assign[j]];
      }
      for (int c = 0; c < 2; ++c) {
        if (counts[c] > 0) centers.row(c) = sums.row(c) / static_cast<double>(counts[c]);
      }
      if (!changed && it > 0) break;
    }
    double inertia = 0.0;
    for (long j = 0; j < n; ++j) inertia += (x.row(j) - centers.row(assign[j])).squaredNorm();
    if (inertia < best.inertia) {
      best.inertia = inertia;
      best.assign = assign;
      best.centers = centers;
    }
  }
  return best;
}

}  // namespace

FullParams initialize(const Dataset& dataset, const EcmConfig& config) {
  dataset.validate();
  config.validate();
  const long n = dataset.n();
  const long d = dataset.dim();

  bool two_distinct = false;
  for (long j = 1; j < n && !two_distinct; ++j) {
    two_distinct = (dataset.features.row(j) != dataset.features.row(0));
  }
  if (!two_distinct) {
    throw std::invalid_argument("initialize: need at least two distinct feature rows");
  }

  std::array<std::vector<long>, 2> by_class;
  for (long j = 0; j < n; ++j) {
    if (dataset.missing_flags[j] == 0) {
      const int z = dataset.observed_labels[j];
      if (z < 1 || z > kComponents) {
        throw std::invalid_argument("initialize: label out of range at row " +
                                    std::to_string(j));
      }
      by_class[z - 1].push_back(j);
    }
  }

  MixtureParams theta;
  theta.weights.resize(2);
  theta.means.resize(2);
  theta.covariances.resize(2);

  const bool labeled_moments = static_cast<long>(by_class[0].size()) >= d + 1 &&
                               static_cast<long>(by_class[1].size()) >= d + 1;
  if (labeled_moments) {
    const double total = static_cast<double>(by_class[0].size() + by_class[1].size());
    for (int c = 0; c < 2; ++c) {
      const auto& rows = by_class[c];
      theta.weights(c) = static_cast<double>(rows.size()) / total;
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
      for (long j : rows) mean += dataset.features.row(j).transpose();
      mean /= static_cast<double>(rows.size());
      Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
      for (long j : rows) {
        const Eigen::VectorXd r = dataset.features.row(j).transpose() - mean;
        cov += r * r.transpose();
      }
      cov /= static_cast<double>(rows.size());
      theta.means[c] = mean;
      theta.covariances[c] = ridge_spd(cov, config.ridge);
    }
  } else {
    KmeansResult km = kmeans_two(dataset.features, config.seed, 10);
    // align cluster order with labels when any are observed
    std::array<std::array<long, 2>, 2> votes{{{0, 0}, {0, 0}}};
    for (int c = 0; c < 2; ++c) {
      for (long j : by_class[c]) ++votes[km.assign[j]][c];
    }
    const bool swap = votes[0][1] + votes[1][0] > votes[0][0] + votes[1][1];
    std::array<long, 2> counts{0, 0};
    for (long j = 0; j < n; ++j) {
      const int c = swap ? 1 - km.assign[j] : km.assign[j];
      km.assign[j] = c;
      ++counts[c];
    }
    Eigen::MatrixXd global_cov = Eigen::MatrixXd::Zero(d, d);
    {
      const Eigen::VectorXd gmean = dataset.features.colwise().mean().transpose();
      for (long j = 0; j < n; ++j) {
        const Eigen::VectorXd r = dataset.features.row(j).transpose() - gmean;
        global_cov += r * r.transpose();
      }
      global_cov /= static_cast<double>(n);
    }
    for (int c = 0; c < 2; ++c) {
      theta.weights(c) =
          std::clamp(static_cast<double>(counts[c]) / static_cast<double>(n), 0.01, 0.99);
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
      if (counts[c] > 0) {
        for (long j = 0; j < n; ++j) {
          if (km.assign[j] == c) mean += dataset.features.row(j).transpose();
        }
        mean /= static_cast<double>(counts[c]);
      } else {
        mean = dataset.features.colwise().mean().transpose();
      }
      Eigen::MatrixXd cov;
      if (counts[c] > d) {
        cov = Eigen::MatrixXd::Zero(d, d);
        for (long j = 0; j < n; ++j) {
          if (km.assign[j] != c) continue;
          const Eigen::VectorXd r = dataset.features.row(j).transpose() - mean;
          cov += r * r.transpose();
        }
        cov /= static_cast<double>(counts[c]);
      } else {
        cov = global_cov;
      }
      theta.means[c] = mean;
      theta.covariances[c] = ridge_spd(cov, config.ridge);
    }
    const double wsum = theta.weights.sum();
    theta.weights /= wsum;
  }
  theta.validate();

  const double lambda0 = (config.link == LinkKind::ao && !config.lambda_estimated)
                             ? config.lambda_fixed
                             : 1.0;
  const Responsibilities resp = responsibilities(dataset.features, theta);
  const UncertaintyProfile prof = uncertainty_profile(resp);
  const double observed_rate =
      std::clamp(dataset.realized_missing_rate(), 0.011, 0.989);
  const double alpha0 = calibrate_intercept(prof.delta_sq, 0.0, lambda0, observed_rate);

  FullParams params;
  params.theta = std::move(theta);
  if (config.link == LinkKind::logit) {
    params.missingness = LogitParams{alpha0, 0.0};
  } else {
    params.missingness = AoParams{alpha0, 0.0, lambda0};
  }
  return params;
}

// ---------------------------------------------------------------------------
// E-step and CM-step 2
// ---------------------------------------------------------------------------

EStepResult e_step(const Dataset& dataset, const FullParams& params) {
  EStepResult out;
  out.tau = responsibilities(dataset.features, params.theta);
  out.uncertainty = uncertainty_profile(out.tau);
  out.q = missing_prob_ao(out.uncertainty.delta_sq, params.ao());
  // labeled rows carry their one-hot label into the weighted moments; delta
  // above stays model-based
  for (long j = 0; j < dataset.n(); ++j) {
    if (dataset.missing_flags[j] == 0) {
      out.tau.tau.row(j).setZero();
      out.tau.tau(j, dataset.observed_labels[j] - 1) = 1.0;
    }
  }
  return out;
}

namespace {

// Analytic score and Hessian restricted to (alpha0, alpha1) at fixed lambda.
void alpha_score(const std::vector<std::uint8_t>& m, const Eigen::VectorXd& x,
                 const AoParams& p, Eigen::Vector2d& grad, Eigen::Matrix2d& hess) {
  grad.setZero();
  hess.setZero();
  for (long j = 0; j < x.size(); ++j) {
    const double eta = p.alpha0 + p.alpha1 * x(j);
    const double q = ao_inverse_link(eta, p.lambda);
    const double pq = q * (1.0 - q);
    const double dq = link_derivative(eta, p.lambda, 1.0 - q);
    double d2q;
    if (dq == 0.0) {
      d2q = 0.0;
    } else if (p.lambda == 0.0) {
      d2q = dq * (1.0 - std::exp(eta));
    } else {
      const double ratio = (eta + std::log(p.lambda) > 35.0)
                               ? 1.0 / p.lambda
                               : std::exp(eta) / (1.0 + p.lambda * std::exp(eta));
      d2q = dq * (1.0 - (1.0 + p.lambda) * ratio);
    }
    const double resid = (m[j] - q) / pq;
    const double a = resid * dq;
    const double u = dq / pq;
    const double du = (d2q * pq - dq * dq * (1.0 - 2.0 * q)) / (pq * pq);
    const double b = -dq * u + (m[j] - q) * du;
    grad(0) += a;
    grad(1) += a * x(j);
    hess(0, 0) += b;
    hess(0, 1) += b * x(j);
    hess(1, 1) += b * x(j) * x(j);
  }
  hess(1, 0) = hess(0, 1);
}

struct AlphaSolve {
  double alpha0, alpha1, loglik;
};

AlphaSolve solve_alpha(const std::vector<std::uint8_t>& m, const Eigen::VectorXd& x,
                       double lambda, double a0, double a1) {
  AoParams p{a0, a1, lambda};
  double ll = missingness_loglik(m, missing_prob_ao(x, p));

  Eigen::Vector2d grad;
  Eigen::Matrix2d hess;
  for (int it = 0; it < 60; ++it) {
    alpha_score(m, x, p, grad, hess);
    // Newton direction; fall back to gradient ascent on a singular Hessian
    Eigen::Vector2d dir;
    const double det = hess.determinant();
    if (std::abs(det) > 1e-300 && std::isfinite(det)) {
      dir = -hess.inverse() * grad;
      if (!(grad.dot(dir) > 0.0) || !dir.allFinite()) dir = grad;
    } else {
      dir = grad;
    }

    double step = 1.0;
    bool improved = false;
    for (int half = 0; half < 40; ++half) {
      AoParams cand{p.alpha0 + step * dir(0), p.alpha1 + step * dir(1), lambda};
      const double cand_ll = missingness_loglik(m, missing_prob_ao(x, cand));
      if (std::isfinite(cand_ll) && cand_ll > ll) {
        const double gain = cand_ll - ll;
        p = cand;
        ll = cand_ll;
        improved = gain > 1e-10 * (1.0 + std::abs(ll));
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return {p.alpha0, p.alpha1, ll};
}

}  // namespace

std::variant<AoParams, LogitParams> cm_step_missingness(
    const std::vector<std::uint8_t>& missing_flags, const Eigen::VectorXd& delta_sq,
    const std::variant<AoParams, LogitParams>& current, const EcmConfig& config) {
  const bool logit = std::holds_alternative<LogitParams>(current);
  AoParams cur = logit ? AoParams{std::get<LogitParams>(current).xi0,
                                  std::get<LogitParams>(current).xi1, 1.0}
                       : std::get<AoParams>(current);
  const double ll_start = missingness_loglik(missing_flags, missing_prob_ao(delta_sq, cur));

  AlphaSolve best;
  double best_lambda = cur.lambda;
  if (!logit && config.link == LinkKind::ao && config.lambda_estimated) {
    // profile search: golden section on log lambda, re-solving alpha per probe
    double warm0 = cur.alpha0, warm1 = cur.alpha1;
    const auto profile = [&](double log_lambda) {
      const AlphaSolve s =
          solve_alpha(missing_flags, delta_sq, std::exp(log_lambda), warm0, warm1);
      warm0 = s.alpha0;
      warm1 = s.alpha1;
      return s.loglik;
    };
    const double log_lo = std::log(config.lambda_grid.first);
    const double log_hi = std::log(config.lambda_grid.second);
    best_lambda = std::exp(golden_section_maximize(profile, log_lo, log_hi, 1e-4));
    best = solve_alpha(missing_flags, delta_sq, best_lambda, cur.alpha0, cur.alpha1);
  } else {
    best_lambda = cur.lambda;
    best = solve_alpha(missing_flags, delta_sq, best_lambda, cur.alpha0, cur.alpha1);
  }

  if (!(best.loglik >= ll_start)) {
    // never hand back a decrease at the frozen delta^2
    return current;
  }
  if (logit) return LogitParams{best.alpha0, best.alpha1};
  return AoParams{best.alpha0, best.alpha1, best_lambda};
}

// ---------------------------------------------------------------------------
// Fit loop
// ---------------------------------------------------------------------------

std::pair<FullParams, FitReport> fit(const Dataset& dataset, const EcmConfig& config) {
  if (dataset.n() < 1 || dataset.dim() < 1) {
    throw std::invalid_argument("fit: dataset must be nonempty with d >= 1");
  }
  return fit_from(dataset, config, initialize(dataset, config));
}

std::pair<FullParams, FitReport> fit_from(const Dataset& dataset, const EcmConfig& config,
                                          const FullParams& initial) {
  dataset.validate();
  config.validate();
  initial.validate();
  if (dataset.n() < 1 || dataset.dim() < 1) {
    throw std::invalid_argument("fit: dataset must be nonempty with d >= 1");
  }

  FullParams params = initial;
  FitReport report;

  double ll = full_loglik(dataset, params);
  if (!std::isfinite(ll)) throw NumericError("fit: non-finite log-likelihood at iteration", 0);
  report.loglik_trace.push_back(ll);

  for (int t = 1; t <= config.max_iters; ++t) {
    bool lsf = false;
    params.theta = cm_step_theta(dataset, params, config, &lsf);
    if (lsf) ++report.theta_step_rejections;

    // CM-step 2 holds delta^2 fixed at the value implied by the current
    // theta, so maximizing the missingness term is an exact conditional
    // maximization of the full log-likelihood.
    const Responsibilities resp = responsibilities(dataset.features, params.theta);
    const UncertaintyProfile prof = uncertainty_profile(resp);
    params.missingness =
        cm_step_missingness(dataset.missing_flags, prof.delta_sq, params.missingness, config);

    const double ll_new = full_loglik(dataset, params);
    if (!std::isfinite(ll_new)) {
      throw NumericError("fit: non-finite log-likelihood at iteration", t);
    }
    report.loglik_trace.push_back(ll_new);
    report.iterations = t;

    const double rel = std::abs(ll_new - ll) / (1.0 + std::abs(ll));
    ll = ll_new;
    if (rel <= config.rel_tol) {
      report.converged = true;
      break;
    }
  }

  EStepResult final_state = e_step(dataset, params);
  report.final_responsibilities = std::move(final_state.tau);
  report.final_params = params;
  return {params, report};
}

std::vector<int> impute_labels(const Dataset& dataset, const FullParams& fitted) {
  const std::vector<int> bayes = bayes_classify(dataset.features, fitted.theta);
  std::vector<int> labels(dataset.n());
  for (long j = 0; j < dataset.n(); ++j) {
    labels[j] = dataset.missing_flags[j] == 0 ? dataset.observed_labels[j] : bayes[j];
  }
  return labels;
}

}  // namespace ssmix
