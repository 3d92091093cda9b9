#include "ssmix/simulate.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "ssmix/error.hpp"

namespace ssmix {

namespace {

constexpr std::uint64_t kMarSeedOffset = 0x6d6172;  // decorrelates deletion from generation

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

void require_positive(const Eigen::VectorXd& v, const char* what) {
  if (v.size() == 0 || v.minCoeff() <= 0.0) {
    throw std::invalid_argument(std::string("sim spec: ") + what + " must be positive");
  }
}

}  // namespace

void SimSpec::validate() const {
  if (n < 1) throw std::invalid_argument("sim spec: n must be >= 1");
  if (!(mixing > 0.0) || !(mixing < 1.0)) {
    throw std::invalid_argument("sim spec: mixing must lie in (0, 1)");
  }
  const auto expected = static_cast<std::size_t>(family);
  if (components.index() != expected) {
    throw std::invalid_argument("sim spec: component block does not match family");
  }
  std::visit(
      [&](const auto& pair) {
        using T = std::decay_t<decltype(pair)>;
        for (const auto& c : pair) {
          if constexpr (std::is_same_v<T, GaussianPair>) {
            if (c.cov.rows() != c.mean.size() || c.cov.cols() != c.mean.size()) {
              throw std::invalid_argument("sim spec: covariance dimension mismatch");
            }
            Eigen::LLT<Eigen::MatrixXd> llt(c.cov);
            if (llt.info() != Eigen::Success) {
              throw std::invalid_argument("sim spec: covariance not positive definite");
            }
          } else if constexpr (std::is_same_v<T, GammaPair>) {
            require_positive(c.shape, "gamma shape");
            require_positive(c.scale, "gamma scale");
            if (c.offset.size() != c.shape.size() || c.scale.size() != c.shape.size()) {
              throw std::invalid_argument("sim spec: gamma block dimension mismatch");
            }
          } else if constexpr (std::is_same_v<T, BetaPair>) {
            require_positive(c.a, "beta a");
            require_positive(c.b, "beta b");
            if (c.a.size() != c.b.size()) {
              throw std::invalid_argument("sim spec: beta block dimension mismatch");
            }
          } else {
            require_positive(c.scale, "laplace scale");
            if (c.location.size() != c.scale.size()) {
              throw std::invalid_argument("sim spec: laplace block dimension mismatch");
            }
          }
        }
      },
      components);
}

SimSpec SimSpec::defaults(Family family) {
  SimSpec spec;
  spec.family = family;
  switch (family) {
    case Family::gaussian: {
      Eigen::MatrixXd cov(2, 2);
      cov << 1.0, 0.3, 0.3, 1.0;
      spec.components = GaussianPair{GaussianComponent{vec2(0.0, 0.0), cov},
                                     GaussianComponent{vec2(1.5, 1.5), cov}};
      break;
    }
    case Family::gamma:
      spec.components =
          GammaPair{GammaComponent{vec2(2.0, 2.0), vec2(1.0, 1.0), vec2(0.0, 0.0)},
                    GammaComponent{vec2(5.0, 5.0), vec2(1.0, 1.0), vec2(0.0, 0.0)}};
      break;
    case Family::beta:
      spec.components = BetaPair{BetaComponent{vec2(2.0, 2.0), vec2(5.0, 5.0)},
                                 BetaComponent{vec2(5.0, 5.0), vec2(2.0, 2.0)}};
      break;
    case Family::laplace: {
      const double s = 1.0 / std::sqrt(2.0);  // unit variance per axis
      spec.components = LaplacePair{LaplaceComponent{vec2(0.0, 0.0), vec2(s, s)},
                                    LaplaceComponent{vec2(1.5, 1.5), vec2(s, s)}};
      break;
    }
  }
  return spec;
}

namespace {

long spec_dim(const SimSpec& spec) {
  return std::visit(
      [](const auto& pair) -> long {
        using T = std::decay_t<decltype(pair)>;
        if constexpr (std::is_same_v<T, GaussianPair>) return pair[0].mean.size();
        else if constexpr (std::is_same_v<T, GammaPair>) return pair[0].shape.size();
        else if constexpr (std::is_same_v<T, BetaPair>) return pair[0].a.size();
        else return pair[0].location.size();
      },
      spec.components);
}

Eigen::VectorXd draw_component(const SimSpec& spec, int component, std::mt19937_64& rng) {
  const long d = spec_dim(spec);
  Eigen::VectorXd x(d);
  std::visit(
      [&](const auto& pair) {
        using T = std::decay_t<decltype(pair)>;
        const auto& c = pair[component];
        if constexpr (std::is_same_v<T, GaussianPair>) {
          std::normal_distribution<double> stdnorm(0.0, 1.0);
          Eigen::VectorXd z(d);
          for (long i = 0; i < d; ++i) z(i) = stdnorm(rng);
          Eigen::LLT<Eigen::MatrixXd> llt(c.cov);
          x = c.mean + llt.matrixL() * z;
        } else if constexpr (std::is_same_v<T, GammaPair>) {
          for (long i = 0; i < d; ++i) {
            std::gamma_distribution<double> g(c.shape(i), 1.0);
            x(i) = g(rng) * c.scale(i) + c.offset(i);
          }
        } else if constexpr (std::is_same_v<T, BetaPair>) {
          for (long i = 0; i < d; ++i) {
            std::gamma_distribution<double> ga(c.a(i), 1.0), gb(c.b(i), 1.0);
            const double u = ga(rng), v = gb(rng);
            x(i) = u / (u + v);
          }
        } else {
          std::uniform_real_distribution<double> unif(-0.5, 0.5);
          for (long i = 0; i < d; ++i) {
            const double u = unif(rng);
            const double sgn = u < 0.0 ? -1.0 : 1.0;
            x(i) = c.location(i) - c.scale(i) * sgn * std::log1p(-2.0 * std::abs(u));
          }
        }
      },
      spec.components);
  return x;
}

}  // namespace

Dataset simulate(const SimSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Eigen::MatrixXd features(spec.n, spec_dim(spec));
  std::vector<int> labels(spec.n);
  for (long j = 0; j < spec.n; ++j) {
    const int cls = unif(rng) < spec.mixing ? 1 : 2;
    labels[j] = cls;
    features.row(j) = draw_component(spec, cls - 1, rng).transpose();
  }
  return Dataset::fully_labeled(std::move(features), std::move(labels), spec.seed);
}

MixtureParams moment_matched_mixture(const SimSpec& spec) {
  spec.validate();
  MixtureParams params;
  params.weights = vec2(spec.mixing, 1.0 - spec.mixing);
  params.means.resize(2);
  params.covariances.resize(2);
  std::visit(
      [&](const auto& pair) {
        using T = std::decay_t<decltype(pair)>;
        for (int k = 0; k < 2; ++k) {
          const auto& c = pair[k];
          if constexpr (std::is_same_v<T, GaussianPair>) {
            params.means[k] = c.mean;
            params.covariances[k] = c.cov;
          } else if constexpr (std::is_same_v<T, GammaPair>) {
            params.means[k] = c.shape.cwiseProduct(c.scale) + c.offset;
            params.covariances[k] =
                c.shape.cwiseProduct(c.scale.cwiseProduct(c.scale)).asDiagonal();
          } else if constexpr (std::is_same_v<T, BetaPair>) {
            const Eigen::ArrayXd sum = (c.a + c.b).array();
            params.means[k] = (c.a.array() / sum).matrix();
            params.covariances[k] =
                (c.a.array() * c.b.array() / (sum.square() * (sum + 1.0)))
                    .matrix()
                    .asDiagonal();
          } else {
            params.means[k] = c.location;
            params.covariances[k] =
                (2.0 * c.scale.array().square()).matrix().asDiagonal();
          }
        }
      },
      spec.components);
  params.validate();
  return params;
}

Dataset apply_mar_deletion(const Dataset& dataset,
                           const std::variant<AoParams, LogitParams>& mechanism,
                           const MixtureParams& oracle_theta,
                           std::optional<double> target_rate) {
  dataset.validate();
  if (dataset.num_labeled() != dataset.n()) {
    throw std::invalid_argument("apply_mar_deletion: dataset must be fully labeled");
  }

  AoParams mech = std::holds_alternative<AoParams>(mechanism)
                      ? std::get<AoParams>(mechanism)
                      : AoParams{std::get<LogitParams>(mechanism).xi0,
                                 std::get<LogitParams>(mechanism).xi1, 1.0};
  mech.validate();

  const Responsibilities resp = responsibilities(dataset.features, oracle_theta);
  const UncertaintyProfile prof = uncertainty_profile(resp);
  if (target_rate) {
    mech.alpha0 = calibrate_intercept(prof.delta_sq, mech.alpha1, mech.lambda, *target_rate);
  }

  Dataset out = dataset;
  std::mt19937_64 rng(dataset.seed + kMarSeedOffset);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (long j = 0; j < out.n(); ++j) {
    const double q = missing_prob_ao(prof.delta_sq(j), mech);
    if (unif(rng) < q) {
      out.observed_labels[j] = 0;
      out.missing_flags[j] = 1;
    }
  }
  return out;
}

}  // namespace ssmix
