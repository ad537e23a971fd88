#include "lgle/samplers.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lgle::numerics {

namespace {

// Marsaglia-Tsang for shape >= 1; returns the variate itself.
double gamma_mt(double shape, RngStream& rng) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

double sample_exponential(RngStream& rng) { return -std::log(rng.uniform()); }

double sample_log_gamma(double shape, RngStream& rng) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw std::domain_error("sample_gamma: shape must be positive");
  }
  if (shape >= 1.0) return std::log(gamma_mt(shape, rng));
  // Gamma(a) = Gamma(a+1) * U^{1/a}
  const double g = gamma_mt(shape + 1.0, rng);
  return std::log(g) + std::log(rng.uniform()) / shape;
}

double sample_gamma(double shape, RngStream& rng) {
  return std::exp(sample_log_gamma(shape, rng));
}

double sample_log_gig0(double log_chi, double log_psi, RngStream& rng) {
  if (!std::isfinite(log_chi) || !std::isfinite(log_psi)) {
    throw std::domain_error("sample_gig0: parameters must be positive and finite");
  }
  // In w = log v the density is proportional to exp(-a cosh(w - w0)).
  const double w0 = 0.5 * (log_chi - log_psi);
  const double log_a = 0.5 * (log_chi + log_psi);
  const double a = std::exp(log_a);
  if (!std::isfinite(a)) return w0;

  // a * (cosh s - 1), a * sinh s, without overflow for tiny a.
  auto a_coshm1 = [&](double s) {
    s = std::abs(s);
    if (s < 1.0) {
      const double h = std::sinh(0.5 * s);
      return 2.0 * a * h * h;
    }
    return 0.5 * (std::exp(log_a + s) + std::exp(log_a - s)) - a;
  };
  auto a_sinh = [&](double s) { return 0.5 * (std::exp(log_a + s) - std::exp(log_a - s)); };

  // Flat envelope on [-t, t] where a (cosh t - 1) = 1; exponential tails.
  double t;
  if (log_a < -20.0) {
    t = std::numbers::ln2 - log_a + std::log1p(std::exp(log_a));
  } else {
    const double e = 1.0 / a;  // acosh(1 + e) without cancellation
    t = std::log1p(e + std::sqrt(e * (2.0 + e)));
  }
  const double h_t = a_coshm1(t);
  const double k = a_sinh(t);
  const double flat_mass = 2.0 * t;
  const double tail_mass = 2.0 * std::exp(-h_t) / k;
  const double p_flat = flat_mass / (flat_mass + tail_mass);

  for (;;) {
    double s, log_env;
    const double u0 = rng.uniform();
    if (u0 < p_flat) {
      s = t * (2.0 * rng.uniform() - 1.0);
      log_env = 0.0;
    } else {
      const double e = sample_exponential(rng) / k;
      s = (rng.uniform() < 0.5) ? -(t + e) : (t + e);
      log_env = -h_t - k * e;
    }
    const double log_f = -a_coshm1(s);
    if (std::log(rng.uniform()) <= log_f - log_env) return w0 + s;
  }
}

double sample_gig0(double chi, double psi, RngStream& rng) {
  if (!(chi > 0.0) || !(psi > 0.0)) {
    throw std::domain_error("sample_gig0: parameters must be positive");
  }
  return std::exp(sample_log_gig0(std::log(chi), std::log(psi), rng));
}

}  // namespace lgle::numerics
