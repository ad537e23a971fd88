#include "lgle/hamiltonians.hpp"

#include <algorithm>
#include <stdexcept>

namespace lgle::numerics {

namespace {

// Composite Simpson for the log-MGF integrand exp(t x) G_theta(x).
double integrate_tilted(double theta, double t) {
  const double rate = theta - t;
  const double lo = -std::log(50.0 + 10.0 * theta);
  const double hi = 60.0 / rate + 5.0;
  const std::size_t n = 2 * static_cast<std::size_t>((hi - lo) / 2e-3 + 1);
  const double h = (hi - lo) / static_cast<double>(n);
  const double lg = std::lgamma(theta);
  auto f = [&](double x) { return std::exp(t * x - theta * x - std::exp(-x) - lg); };
  double s = f(lo) + f(hi);
  for (std::size_t i = 1; i < n; ++i) {
    s += f(lo + static_cast<double>(i) * h) * ((i & 1) ? 4.0 : 2.0);
  }
  return s * h / 3.0;
}

}  // namespace

HamiltonianReport validate_hamiltonians(double theta) {
  if (!(theta > 0.0)) throw std::domain_error("validate_hamiltonians: theta must be positive");
  HamiltonianReport rep;
  rep.theta = theta;
  rep.normalization_residual = std::abs(integrate_tilted(theta, 0.0) - 1.0);

  const double h = 0.01;
  for (int i = -500; i <= 500; ++i) {
    const double x = i * h;
    const double d_rw = h_rw(theta, x + h) - 2.0 * h_rw(theta, x) + h_rw(theta, x - h);
    const double d_in = h_int(x + h) - 2.0 * h_int(x) + h_int(x - h);
    rep.convexity_violation_rw = std::max(rep.convexity_violation_rw, -d_rw);
    rep.convexity_violation_int = std::max(rep.convexity_violation_int, -d_in);
  }

  const double t_hi = theta - 0.05;
  const int n_t = 16;
  for (int k = 0; k <= n_t; ++k) {
    const double t = -2.0 + (t_hi + 2.0) * k / n_t;
    const double numeric = std::log(integrate_tilted(theta, t));
    rep.log_mgf_residual =
        std::max(rep.log_mgf_residual, std::abs(numeric - log_mgf_increment(theta, t)));
  }
  return rep;
}

}  // namespace lgle::numerics
