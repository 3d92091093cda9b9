#include "ssmix/optim.hpp"

#include <cmath>
#include <limits>

namespace ssmix {

BfgsResult bfgs_maximize(const std::function<double(const Eigen::VectorXd&)>& f,
                         const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
                         const Eigen::VectorXd& x0, const BfgsOptions& opts) {
  const long n = x0.size();
  BfgsResult res;
  res.x = x0;
  res.value = f(x0);

  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd g = grad(res.x);

  for (int it = 0; it < opts.max_iters; ++it) {
    if (g.cwiseAbs().maxCoeff() <= opts.grad_tol) break;

    Eigen::VectorXd direction = h_inv * g;
    double slope = g.dot(direction);
    if (!(slope > 0.0) || !direction.allFinite()) {
      // approximation lost positive definiteness; reset to steepest ascent
      h_inv.setIdentity();
      direction = g;
      slope = g.squaredNorm();
    }

    double step = 1.0;
    double new_value = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd x_new;
    bool accepted = false;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      x_new = res.x + step * direction;
      new_value = f(x_new);
      if (std::isfinite(new_value) &&
          new_value >= res.value + opts.armijo_c1 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (it == 0) res.line_search_failed = true;
      break;
    }

    Eigen::VectorXd g_new = grad(x_new);
    const Eigen::VectorXd s = x_new - res.x;
    const Eigen::VectorXd y = g - g_new;  // descent convention on -f
    const double sy = s.dot(y);
    if (sy > 1e-10 * s.norm() * y.norm()) {
      const Eigen::VectorXd hy = h_inv * y;
      const double yhy = y.dot(hy);
      h_inv += ((sy + yhy) / (sy * sy)) * (s * s.transpose()) -
               (hy * s.transpose() + s * hy.transpose()) / sy;
    }

    const double improvement = new_value - res.value;
    res.x = x_new;
    res.value = new_value;
    g = g_new;
    res.iterations = it + 1;
    if (improvement <= opts.value_tol * (1.0 + std::abs(res.value))) break;
  }
  return res;
}

double golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                               double tol, int max_iters) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iters && (b - a) > tol; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc > fd ? c : d;
}

}  // namespace ssmix
