#pragma once

#include <string>

namespace lgle::kpz {

/// Scaling constants of the log-gamma polymer at parameter theta and slope r.
struct KpzConstants {
  double theta = 0.0;
  double r = 0.0;
  double alpha_star = 0.0;  // g_theta^{-1}(r)
  double h = 0.0;
  double h_prime = 0.0;
  double h_second = 0.0;
  double A = 0.0;  // Psi'(alpha*)
  double lambda = 0.0;
  double d = 0.0;
  double kappa = 0.0;
  double sigma_p2 = 0.0;
  double rho = 0.0;
  double j = 0.0;

  // identity residuals
  double res_alpha = 0.0;       // |g_theta(alpha*) - r| / max(1, r)
  double res_d_series = 0.0;    // |d^3 (series) - A^2/(2 h'')|, relative
  double res_kappa_A = 0.0;     // |A kappa/(2 d^2) - 1|
  double res_kappa_h = 0.0;     // |h'' kappa^2/(2 d) - 1|
  double res_sigma = 0.0;       // |sigma_p2 - A|
  double res_symmetry = 0.0;    // |g^{-1}(1/r) + g^{-1}(r) - theta|

  double max_residual() const;
};

/// h_theta(x) = x Psi(alpha) + Psi(theta - alpha), alpha = g_theta^{-1}(x).
double h_theta(double theta, double x);

struct HDerivs {
  double h_prime;
  double h_second;
};
HDerivs h_theta_derivs(double theta, double x);

/// d^3 from the two series sum x/(n+alpha)^3 + 1/(n+theta-alpha)^3,
/// truncated with an integral tail.
double d_cubed_series(double theta, double x);

/// d_theta(x) = (A^2 / (2 h''))^{1/3} and kappa_theta(x) = (2A / h''^2)^{1/3}.
double d_theta(double theta, double x);
double kappa_theta(double theta, double x);

KpzConstants kpz_report(double theta, double r);

/// Psi'(g^{-1}(r)); also recomputed through Lambda(t) = log Gamma(theta - t)
/// - log Gamma(theta) by solving Lambda'(t) = -h'(r) and evaluating
/// Lambda''. Throws NonConvergenceError when the routes disagree beyond 1e-9.
double sigma_p_squared(double theta, double r);

/// The second route on its own (root-find on Lambda').
double sigma_p_squared_via_lambda(double theta, double r);

std::string to_json(const KpzConstants& k);

}  // namespace lgle::kpz
