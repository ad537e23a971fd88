#include "lgle/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "lgle/errors.hpp"

namespace lgle::numerics {

namespace {

constexpr double kLift = 10.0;

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error(std::string(what) + ": argument must be positive and finite");
  }
}

// Asymptotic tails for x >= kLift. Coefficients are B_{2k}/(2k), B_{2k},
// and (2k+1) B_{2k} respectively.
double digamma_asym(double x) {
  static constexpr double c[] = {1.0 / 12, -1.0 / 120, 1.0 / 252, -1.0 / 240,
                                 1.0 / 132, -691.0 / 32760, 1.0 / 12};
  const double x2 = 1.0 / (x * x);
  double s = 0.0;
  for (int k = 6; k >= 0; --k) s = (s + c[k]) * x2;
  return std::log(x) - 0.5 / x - s;
}

double trigamma_asym(double x) {
  static constexpr double c[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30,
                                 5.0 / 66, -691.0 / 2730, 7.0 / 6};
  const double x2 = 1.0 / (x * x);
  double s = 0.0;
  for (int k = 6; k >= 0; --k) s = (s + c[k]) * x2;
  return 1.0 / x + 0.5 * x2 + s / x;
}

double tetragamma_asym(double x) {
  static constexpr double c[] = {1.0 / 2, -1.0 / 6, 1.0 / 6, -3.0 / 10,
                                 5.0 / 6, -691.0 / 210, 35.0 / 2};
  const double x2 = 1.0 / (x * x);
  double s = 0.0;
  for (int k = 6; k >= 0; --k) s = (s + c[k]) * x2;
  return -x2 - x2 / x - s * x2;
}

}  // namespace

double digamma(double x) {
  require_positive(x, "digamma");
  double acc = 0.0;
  while (x < kLift) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  return acc + digamma_asym(x);
}

double polygamma(int m, double x) {
  if (m != 1 && m != 2) throw std::domain_error("polygamma: order must be 1 or 2");
  require_positive(x, "polygamma");
  double acc = 0.0;
  if (m == 1) {
    while (x < kLift) {
      acc += 1.0 / (x * x);
      x += 1.0;
    }
    return acc + trigamma_asym(x);
  }
  while (x < kLift) {
    acc -= 2.0 / (x * x * x);
    x += 1.0;
  }
  return acc + tetragamma_asym(x);
}

double digamma_inv(double y) {
  if (!std::isfinite(y)) throw std::domain_error("digamma_inv: argument must be finite");
  // Minka's starting point, then safeguarded Newton.
  double x = y >= -2.22 ? std::exp(y) + 0.5 : -1.0 / (y + 0.5772156649015329);
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200; ++it) {
    const double f = digamma(x) - y;
    if (f > 0) hi = x; else lo = x;
    if (f == 0.0) return x;
    double nx = x - f / trigamma(x);
    if (!(nx > lo && nx < hi)) nx = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * x;
    if (std::abs(nx - x) <= 1e-15 * x) return nx;
    x = nx;
  }
  throw NonConvergenceError("digamma_inv: no convergence");
}

double g_theta(double theta, double z) {
  require_positive(theta, "g_theta");
  if (!(z > 0.0 && z < theta)) throw std::domain_error("g_theta: z must lie in (0, theta)");
  return trigamma(theta - z) / trigamma(z);
}

double g_theta_prime(double theta, double z) {
  if (!(z > 0.0 && z < theta)) throw std::domain_error("g_theta_prime: z must lie in (0, theta)");
  const double a = trigamma(z), b = trigamma(theta - z);
  const double da = polygamma(2, z), db = polygamma(2, theta - z);
  return -(db * a + b * da) / (a * a);
}

double g_theta_inv(double theta, double r) {
  require_positive(theta, "g_theta_inv");
  require_positive(r, "g_theta_inv");
  const double eps = 1e-9 * theta;
  double lo = eps, hi = theta - eps;
  if (g_theta(theta, lo) > r || g_theta(theta, hi) < r) {
    throw NonConvergenceError("g_theta_inv: target outside the bisection bracket");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g_theta(theta, mid) < r) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

}  // namespace lgle::numerics
