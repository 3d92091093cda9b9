#pragma once

#include <Eigen/Dense>
#include <functional>

namespace ssmix {

struct BfgsOptions {
  int max_iters = 25;
  int max_backtracks = 40;
  double armijo_c1 = 1e-4;
  double grad_tol = 1e-8;   // stop on ||g||_inf below this
  double value_tol = 1e-12; // stop on relative objective stall
};

struct BfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool line_search_failed = false;  // first step found no ascent direction
};

// Dense BFGS ascent (maximization) with Armijo backtracking. Only improving
// steps are accepted, so result.value >= f(x0) always holds. `grad` may be
// null, in which case a caller-supplied gradient functional is required.
BfgsResult bfgs_maximize(const std::function<double(const Eigen::VectorXd&)>& f,
                         const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
                         const Eigen::VectorXd& x0, const BfgsOptions& opts = {});

// Golden-section maximization of a unimodal function on [lo, hi].
// Returns the abscissa of the best probe; tol is on the interval width.
double golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                               double tol = 1e-6, int max_iters = 200);

}  // namespace ssmix
