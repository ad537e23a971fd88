#pragma once

namespace lgle::numerics {

/// Psi(x) = d/dx log Gamma(x), x > 0.
double digamma(double x);

/// Psi^(m)(x) for m in {1, 2}.
double polygamma(int m, double x);

inline double trigamma(double x) { return polygamma(1, x); }

/// Solves digamma(x) = y for x > 0.
double digamma_inv(double y);

/// Psi'(theta - z) / Psi'(z), 0 < z < theta.
double g_theta(double theta, double z);

/// Derivative of g_theta in z.
double g_theta_prime(double theta, double z);

/// Inverse of g_theta in z (bisection on (eps, theta - eps), eps = 1e-9 theta).
double g_theta_inv(double theta, double r);

/// log(exp(a) + exp(b)) with -inf handled.
double log_add_exp(double a, double b);

}  // namespace lgle::numerics
