#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <variant>

#include "ssmix/dataset.hpp"
#include "ssmix/missingness.hpp"
#include "ssmix/mixture.hpp"

namespace ssmix {

enum class Family { gaussian, gamma, beta, laplace };

struct GaussianComponent {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

struct GammaComponent {
  Eigen::VectorXd shape;   // per axis, > 0
  Eigen::VectorXd scale;   // per axis, > 0
  Eigen::VectorXd offset;  // per axis shift
};

struct BetaComponent {
  Eigen::VectorXd a;  // per axis, > 0
  Eigen::VectorXd b;  // per axis, > 0
};

struct LaplaceComponent {
  Eigen::VectorXd location;
  Eigen::VectorXd scale;  // per axis, > 0
};

using GaussianPair = std::array<GaussianComponent, 2>;
using GammaPair = std::array<GammaComponent, 2>;
using BetaPair = std::array<BetaComponent, 2>;
using LaplacePair = std::array<LaplaceComponent, 2>;

// Two-component synthetic mixture specification. Axes are drawn
// independently within a component for the non-Gaussian families.
struct SimSpec {
  Family family = Family::gaussian;
  long n = 2000;
  double mixing = 0.5;  // P(class 1)
  std::uint64_t seed = 1;
  std::variant<GaussianPair, GammaPair, BetaPair, LaplacePair> components;

  void validate() const;

  // Built-in designs: Gaussian means (0,0)/(1.5,1.5) with shared covariance
  // [[1, .3], [.3, 1]]; Gamma shapes (2,2)/(5,5) at unit scale; Beta
  // (2,5)/(5,2) per axis; Laplace at the Gaussian means with scale 1/sqrt(2).
  static SimSpec defaults(Family family);
};

// Draws a fully labeled dataset; deterministic in (spec, spec.seed).
Dataset simulate(const SimSpec& spec);

// Gaussian mixture with the exact per-component means/covariances implied by
// the SimSpec (moment-matched for the non-Gaussian families). Used as the
// oracle that defines margin confidence for MAR deletion, and as ground
// truth in recovery checks.
MixtureParams moment_matched_mixture(const SimSpec& spec);

// Deletes labels under the margin-based MAR mechanism: delta^2 comes from
// oracle_theta responsibilities, the mechanism intercept is re-calibrated
// when target_rate is given, and each label is dropped with probability
// q(delta_j^2). Features and true labels are never modified. The Bernoulli
// draws use dataset.seed + a fixed offset.
Dataset apply_mar_deletion(const Dataset& dataset,
                           const std::variant<AoParams, LogitParams>& mechanism,
                           const MixtureParams& oracle_theta,
                           std::optional<double> target_rate = std::nullopt);

}  // namespace ssmix
