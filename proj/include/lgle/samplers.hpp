#pragma once

#include "lgle/rng.hpp"

namespace lgle::numerics {

/// Gamma(shape, 1) variate.
double sample_gamma(double shape, RngStream& rng);

/// log of a Gamma(shape, 1) variate; stays finite for very small shapes
/// where the variate itself would underflow.
double sample_log_gamma(double shape, RngStream& rng);

/// log d for d inverse-gamma(theta): -log Gamma(theta).
inline double sample_log_inverse_gamma(double theta, RngStream& rng) {
  return -sample_log_gamma(theta, rng);
}

/// Generalized inverse Gaussian, order 0: density proportional to
/// v^{-1} exp(-(chi/v + psi v)/2) on v > 0.
double sample_gig0(double chi, double psi, RngStream& rng);

/// Same law, returned as log v, with parameters given as logs.
double sample_log_gig0(double log_chi, double log_psi, RngStream& rng);

/// Standard exponential.
double sample_exponential(RngStream& rng);

}  // namespace lgle::numerics
