#include "lgle/kpz.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "lgle/errors.hpp"
#include "lgle/special.hpp"

namespace lgle::kpz {

using numerics::digamma;
using numerics::g_theta_inv;
using numerics::g_theta_prime;
using numerics::polygamma;
using numerics::trigamma;

namespace {

void check_args(double theta, double x, const char* what) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw std::domain_error(std::string(what) + ": theta must be positive");
  }
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error(std::string(what) + ": argument must be positive");
  }
}

// sum_{n>=0} (n+a)^{-3}: 10^6 terms, then the Euler-Maclaurin tail.
double cube_series(double a) {
  constexpr long kTerms = 1000000;
  long double s = 0;
  for (long n = kTerms - 1; n >= 0; --n) {
    const long double v = 1.0L / (n + a);
    s += v * v * v;
  }
  const long double b = kTerms + a;
  s += 1 / (2 * b * b) + 1 / (2 * b * b * b) + 1 / (4 * b * b * b * b);
  return static_cast<double>(s);
}

}  // namespace

double KpzConstants::max_residual() const {
  return std::max({res_alpha, res_d_series, res_kappa_A, res_kappa_h, res_sigma, res_symmetry});
}

double h_theta(double theta, double x) {
  check_args(theta, x, "h_theta");
  const double a = g_theta_inv(theta, x);
  return x * digamma(a) + digamma(theta - a);
}

HDerivs h_theta_derivs(double theta, double x) {
  check_args(theta, x, "h_theta_derivs");
  const double a = g_theta_inv(theta, x);
  // h' = Psi(alpha) because the alpha-derivative of x Psi(alpha) + Psi(theta - alpha)
  // vanishes at alpha*; h'' = Psi'(alpha) d(alpha*)/dx.
  return {digamma(a), trigamma(a) / g_theta_prime(theta, a)};
}

double d_cubed_series(double theta, double x) {
  check_args(theta, x, "d_cubed_series");
  const double a = g_theta_inv(theta, x);
  return x * cube_series(a) + cube_series(theta - a);
}

double d_theta(double theta, double x) {
  check_args(theta, x, "d_theta");
  const double A = trigamma(g_theta_inv(theta, x));
  return std::cbrt(A * A / (2.0 * h_theta_derivs(theta, x).h_second));
}

double kappa_theta(double theta, double x) {
  check_args(theta, x, "kappa_theta");
  const double A = trigamma(g_theta_inv(theta, x));
  const double h2 = h_theta_derivs(theta, x).h_second;
  return std::cbrt(2.0 * A / (h2 * h2));
}

KpzConstants kpz_report(double theta, double r) {
  check_args(theta, r, "kpz_report");
  KpzConstants k;
  k.theta = theta;
  k.r = r;
  k.alpha_star = g_theta_inv(theta, r);
  const double a = k.alpha_star;
  k.h = r * digamma(a) + digamma(theta - a);
  const auto hd = h_theta_derivs(theta, r);
  k.h_prime = hd.h_prime;
  k.h_second = hd.h_second;
  k.A = trigamma(a);
  k.lambda = 1.0 / k.h_second;
  k.d = std::cbrt(k.A * k.A / (2.0 * k.h_second));
  k.kappa = std::cbrt(2.0 * k.A / (k.h_second * k.h_second));
  k.sigma_p2 = sigma_p_squared(theta, r);
  k.rho = -digamma(a);
  k.j = -digamma(theta - a);

  k.res_alpha = std::abs(numerics::g_theta(theta, a) - r) / std::max(1.0, r);
  const double d3 = k.A * k.A / (2.0 * k.h_second);
  k.res_d_series = std::abs(d_cubed_series(theta, r) - d3) / d3;
  k.res_kappa_A = std::abs(k.A * k.kappa / (2.0 * k.d * k.d) - 1.0);
  k.res_kappa_h = std::abs(k.h_second * k.kappa * k.kappa / (2.0 * k.d) - 1.0);
  k.res_sigma = std::abs(k.sigma_p2 - k.A);
  k.res_symmetry = std::abs(g_theta_inv(theta, 1.0 / r) + a - theta);
  return k;
}

double sigma_p_squared_via_lambda(double theta, double r) {
  check_args(theta, r, "sigma_p_squared");
  // Lambda'(t) = -Psi(theta - t) is increasing in t; solve Lambda'(t) = p with p = -h'(r).
  const double p = -h_theta_derivs(theta, r).h_prime;
  auto lambda_prime = [theta](double t) { return -digamma(theta - t); };
  double lo = theta - 1.0, hi = theta * (1.0 - 1e-15);
  while (lambda_prime(lo) > p) {
    lo = theta - 2.0 * (theta - lo);
    if (theta - lo > 1e300) throw NonConvergenceError("sigma_p_squared: cannot bracket root");
  }
  if (lambda_prime(hi) < p) throw NonConvergenceError("sigma_p_squared: cannot bracket root");
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (lambda_prime(mid) < p) lo = mid; else hi = mid;
  }
  const double t_star = 0.5 * (lo + hi);
  return trigamma(theta - t_star);  // Lambda''(t*)
}

double sigma_p_squared(double theta, double r) {
  check_args(theta, r, "sigma_p_squared");
  const double direct = trigamma(g_theta_inv(theta, r));
  const double via_lambda = sigma_p_squared_via_lambda(theta, r);
  if (std::abs(direct - via_lambda) > 1e-9 * std::max(1.0, direct)) {
    throw NonConvergenceError("sigma_p_squared: routes disagree");
  }
  return direct;
}

std::string to_json(const KpzConstants& k) {
  nlohmann::ordered_json j;
  j["theta"] = k.theta;
  j["r"] = k.r;
  j["alpha_star"] = k.alpha_star;
  j["h"] = k.h;
  j["h_prime"] = k.h_prime;
  j["h_second"] = k.h_second;
  j["A"] = k.A;
  j["lambda"] = k.lambda;
  j["d"] = k.d;
  j["kappa"] = k.kappa;
  j["sigma_p2"] = k.sigma_p2;
  j["rho"] = k.rho;
  j["j"] = k.j;
  j["residuals"] = {{"alpha", k.res_alpha},       {"d_series", k.res_d_series},
                    {"kappa_A", k.res_kappa_A},   {"kappa_h", k.res_kappa_h},
                    {"sigma", k.res_sigma},       {"symmetry", k.res_symmetry}};
  return j.dump(2);
}

}  // namespace lgle::kpz
