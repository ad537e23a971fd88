#include "lgle/airy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lgle/errors.hpp"

namespace lgle::numerics {

namespace {

constexpr long double kAi0 = 0.355028053887817239260063186004183176L;
constexpr long double kAip0 = -0.258819403792806798405183560189203963L;
constexpr double kSeriesLimit = 8.0;

AiryValues airy_series(double xd) {
  const long double x = xd, x3 = x * x * x;
  // f = sum t_k, g = sum s_k, with derivatives df, dg
  long double t = 1.0L, f = 1.0L;
  long double s = x, g = x;
  long double dt = x * x / 2.0L, df = dt;
  long double ds = 1.0L, dg = 1.0L;
  for (int k = 0; k < 200; ++k) {
    const long double k3 = 3.0L * k;
    t *= x3 / ((k3 + 2) * (k3 + 3));
    s *= x3 / ((k3 + 3) * (k3 + 4));
    ds *= x3 / ((k3 + 1) * (k3 + 3));
    f += t;
    g += s;
    dg += ds;
    if (k >= 1) {
      dt *= x3 / (k3 * (k3 + 2));
      df += dt;
    }
    const long double tiny = 1e-22L;
    if (k > 4 && std::fabs(t) < tiny * std::fabs(f) && std::fabs(s) < tiny * (std::fabs(g) + 1e-300L) &&
        std::fabs(ds) < tiny * std::fabs(dg) && std::fabs(dt) < tiny * (std::fabs(df) + 1e-300L)) {
      break;
    }
  }
  return {static_cast<double>(kAi0 * f + kAip0 * g), static_cast<double>(kAi0 * df + kAip0 * dg)};
}

// u_k and v_k of the Airy asymptotic expansions.
void uv_coeffs(int n, std::vector<double>& u, std::vector<double>& v) {
  u.assign(static_cast<std::size_t>(n), 1.0);
  v.assign(static_cast<std::size_t>(n), 1.0);
  for (int k = 1; k < n; ++k) {
    u[k] = u[k - 1] * (6.0 * k - 5) * (6.0 * k - 3) * (6.0 * k - 1) / ((2.0 * k - 1) * 216.0 * k);
    v[k] = -u[k] * (6.0 * k + 1) / (6.0 * k - 1);
  }
}

AiryValues airy_asymptotic(double x) {
  static const auto coeffs = [] {
    std::pair<std::vector<double>, std::vector<double>> c;
    uv_coeffs(40, c.first, c.second);
    return c;
  }();
  const auto& u = coeffs.first;
  const auto& v = coeffs.second;
  const double z = std::abs(x);
  const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
  const double q = std::pow(z, 0.25);
  const double sqpi = std::sqrt(std::numbers::pi);
  if (x > 0) {
    double su = 0, sv = 0, p = 1, last = INFINITY;
    for (std::size_t k = 0; k < u.size(); ++k) {
      const double tu = u[k] * p, tv = v[k] * p;
      if (std::abs(tu) > last) break;  // optimal truncation
      last = std::abs(tu);
      su += tu;
      sv += tv;
      p *= -1.0 / zeta;
    }
    const double e = std::exp(-zeta) / (2.0 * sqpi);
    return {e / q * su, -e * q * sv};
  }
  double ue = 0, uo = 0, ve = 0, vo = 0, p = 1, last = INFINITY;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (std::abs(u[k] * p) > last) break;
    last = std::abs(u[k] * p);
    const double sign = (k / 2) % 2 == 0 ? 1.0 : -1.0;
    if (k % 2 == 0) {
      ue += sign * u[k] * p;
      ve += sign * v[k] * p;
    } else {
      uo += sign * u[k] * p;
      vo += sign * v[k] * p;
    }
    p /= zeta;
  }
  const double ph = zeta - std::numbers::pi / 4;
  const double c = std::cos(ph), s = std::sin(ph);
  return {(c * ue + s * uo) / (sqpi * q), q / sqpi * (s * ve - c * vo)};
}

}  // namespace

AiryValues airy_ai(double x) {
  if (std::isnan(x)) throw std::domain_error("airy_ai: NaN argument");
  if (x > 100.0) return {0.0, 0.0};
  if (std::abs(x) <= kSeriesLimit) return airy_series(x);
  return airy_asymptotic(x);
}

Quadrature gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::domain_error("gauss_legendre: need n >= 1");
  Quadrature q;
  q.nodes.resize(static_cast<std::size_t>(n));
  q.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    long double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    long double dp = 0;
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      long double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const long double p2 = ((2.0L * k - 1) * x * p1 - (k - 1.0L) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1;
      dp = n * (x * p1 - p0) / (x * x - 1);
      const long double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-19L) {
        converged = true;
        break;
      }
    }
    if (!converged) throw NonConvergenceError("gauss_legendre: Newton did not converge");
    const long double w = 2.0L / ((1 - x * x) * dp * dp);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    q.nodes[i] = static_cast<double>(mid - half * x);
    q.nodes[n - 1 - i] = static_cast<double>(mid + half * x);
    q.weights[i] = q.weights[n - 1 - i] = static_cast<double>(half * w);
  }
  return q;
}

}  // namespace lgle::numerics
