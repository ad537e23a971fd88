#pragma once

#include <cmath>
#include <limits>

namespace lgle::numerics {

/// Log-gamma random walk Hamiltonian: theta x + e^{-x} + log Gamma(theta).
inline double h_rw(double theta, double x) {
  return theta * x + std::exp(-x) + std::lgamma(theta);
}

/// log G_theta(x) = -H^RW(x); G_theta is the density of log d, d inverse-gamma(theta).
inline double log_g(double theta, double x) { return -h_rw(theta, x); }

/// Interaction Hamiltonian e^x, with H(-inf) = 0 exactly.
inline double h_int(double x) {
  if (x == -std::numeric_limits<double>::infinity()) return 0.0;
  return std::exp(x);
}

/// log Gamma(theta - t) - log Gamma(theta), the log-MGF of log d (t < theta).
inline double log_mgf_increment(double theta, double t) {
  return std::lgamma(theta - t) - std::lgamma(theta);
}

struct HamiltonianReport {
  double theta = 0.0;
  double normalization_residual = 0.0;   // |int G_theta - 1|
  double convexity_violation_rw = 0.0;   // max(0, -second difference) of H^RW
  double convexity_violation_int = 0.0;  // same for H
  double log_mgf_residual = 0.0;         // max over the t-grid
};

HamiltonianReport validate_hamiltonians(double theta);

}  // namespace lgle::numerics
