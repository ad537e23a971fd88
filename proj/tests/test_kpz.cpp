#include <cmath>
#include <functional>

#include "doctest.h"
#include "lgle/kpz.hpp"
#include "lgle/special.hpp"
#include "oracles.hpp"

using namespace lgle;
using namespace lgle::kpz;

namespace {

// Golden-section maximum of f on [a, b] after a coarse scan.
double maximize(const std::function<double(double)>& f, double a, double b) {
  const int n = 200;
  int best = 0;
  double best_v = -1e300;
  for (int i = 1; i < n; ++i) {
    const double v = f(a + (b - a) * i / n);
    if (v > best_v) best_v = v, best = i;
  }
  double lo = a + (b - a) * (best - 1) / n, hi = a + (b - a) * (best + 1) / n;
  const double g = (std::sqrt(5.0) - 1) / 2;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    if (f1 < f2) {
      lo = x1, x1 = x2, f1 = f2, x2 = lo + g * (hi - lo), f2 = f(x2);
    } else {
      hi = x2, x2 = x1, f2 = f1, x1 = hi - g * (hi - lo), f1 = f(x1);
    }
  }
  return std::max(f1, f2);
}

// psi via the series oracle, for the Legendre check
double psi(double x) { return oracle::digamma_series(x, 20000); }

}  // namespace

TEST_CASE("h_theta symmetry point and stationarity") {
  for (double th : {0.5, 1.0, 2.0, 3.7}) {
    CHECK(std::abs(h_theta(th, 1.0) - 2 * numerics::digamma(th / 2)) < 1e-12);
    CHECK(std::abs(h_theta_derivs(th, 1.0).h_prime - numerics::digamma(th / 2)) < 1e-12);
    for (double x : {0.5, 1.0, 2.0}) {
      const double a = numerics::g_theta_inv(th, x);
      const double e = 1e-5;
      auto F = [&](double al) { return x * numerics::digamma(al) + numerics::digamma(th - al); };
      CHECK(std::abs((F(a + e) - F(a - e)) / (2 * e)) < 1e-9 * std::max(1.0, 1 / (a * a)) * 10);
    }
  }
  CHECK_THROWS_AS(h_theta(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(h_theta(1.0, -2.0), std::domain_error);
}

TEST_CASE("h_theta equals the variational formula") {
  // x Psi(alpha) + Psi(theta - alpha) is concave in alpha, so h is its supremum
  // and the infimum over rho of r rho + j(rho) is -h.
  for (double th : {0.5, 1.0, 2.0}) {
    for (double x : {0.5, 1.0, 2.0}) {
      const double sup = maximize([&](double a) { return x * psi(a) + psi(th - a); },
                                  1e-6 * th, th * (1 - 1e-6));
      CHECK(std::abs(h_theta(th, x) - sup) < 1e-9);
      const double inf = -sup;  // rho = -Psi(alpha), j = -Psi(theta - alpha)
      const auto k = kpz_report(th, x);
      CHECK(std::abs(k.r * k.rho + k.j - inf) < 1e-8);
    }
  }
}

TEST_CASE("derivatives against finite differences") {
  for (double th : {0.5, 2.0}) {
    for (double x : {0.5, 1.0, 2.0, 3.0}) {
      const auto d = h_theta_derivs(th, x);
      const double e1 = 1e-5;
      const double fd1 = (h_theta(th, x + e1) - h_theta(th, x - e1)) / (2 * e1);
      CHECK(d.h_prime == doctest::Approx(fd1).epsilon(1e-6));
      const double e2 = 1e-4;
      const double fd2 =
          (h_theta(th, x + e2) - 2 * h_theta(th, x) + h_theta(th, x - e2)) / (e2 * e2);
      CHECK(d.h_second == doctest::Approx(fd2).epsilon(1e-4));
      CHECK(d.h_second > 0);
    }
  }
}

TEST_CASE("h_theta is convex") {
  const double th = 1.5, e = 1e-3;
  for (int i = 1; i < 400; ++i) {
    const double x = 0.05 + 0.01 * i;
    CHECK(h_theta(th, x + e) - 2 * h_theta(th, x) + h_theta(th, x - e) >= 0);
  }
}

TEST_CASE("constant identities on the 3x3 and 5x5 grids") {
  for (double th : {0.5, 1.0, 2.0}) {
    for (double r : {0.5, 1.0, 2.0}) {
      const auto k = kpz_report(th, r);
      CHECK(k.res_d_series < 1e-8);
      CHECK(k.res_kappa_A < 1e-10);
      CHECK(k.res_kappa_h < 1e-10);
      CHECK(k.res_symmetry < 1e-10);
      // d from the defining series, summed independently
      const double a = k.alpha_star;
      const double d3 = r * oracle::zeta_series(3, a) + oracle::zeta_series(3, th - a);
      CHECK(std::abs(std::cbrt(d3) - k.d) < 1e-8);
      CHECK(k.sigma_p2 == k.A);
      CHECK(std::abs(k.lambda * k.h_second - 1) < 1e-15);
    }
  }
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double th = 0.3 + (5.0 - 0.3) * i / 4, r = 0.3 + (5.0 - 0.3) * j / 4;
      CHECK(kpz_report(th, r).max_residual() < 1e-9);
    }
  }
}

TEST_CASE("sigma_p squared by two routes") {
  CHECK(std::abs(sigma_p_squared(2.0, 1.0) - numerics::trigamma(1.0)) < 1e-12);
  CHECK(std::abs(sigma_p_squared(3.0, 1.0) - numerics::trigamma(1.5)) < 1e-12);
  CHECK(std::abs(sigma_p_squared_via_lambda(2.0, 1.5) - sigma_p_squared(2.0, 1.5)) < 1e-9);
  // independent: Lambda''(t) by finite differences of log Gamma at the root
  const double a = numerics::g_theta_inv(2.0, 1.5);
  const double t = 2.0 - a, e = 1e-4;
  auto L = [](double s) { return std::lgamma(2.0 - s) - std::lgamma(2.0); };
  CHECK(std::abs((L(t + e) - 2 * L(t) + L(t - e)) / (e * e) - sigma_p_squared(2.0, 1.5)) < 1e-6);
}

TEST_CASE("json report has all fields") {
  const auto s = to_json(kpz_report(2.0, 1.0));
  for (const char* key : {"alpha_star", "h_second", "kappa", "sigma_p2", "residuals"}) {
    CHECK(s.find(key) != std::string::npos);
  }
}
