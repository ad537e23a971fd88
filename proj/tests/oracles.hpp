#pragma once
// Independent reference computations used only by the tests. Nothing here
// calls into the library.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

inline constexpr double kEulerGamma = 0.57721566490153286061;

// Psi(z) = -gamma + sum_{n>=0} (1/(n+1) - 1/(n+z)), summed to K terms plus
// an Euler-Maclaurin tail.
inline double digamma_series(double z, long K = 10000000) {
  long double s = 0;
  for (long n = K - 1; n >= 0; --n) {
    s += 1.0L / (n + 1) - 1.0L / (n + z);
  }
  const long double k = K;
  s += std::log((k + z) / (k + 1)) + (z - 1) / (2 * (k + 1) * (k + z));
  return static_cast<double>(s - kEulerGamma);
}

// sum_{n>=0} (n+x)^{-p} for p in {2,3}, with tail correction.
inline double zeta_series(int p, double x, long K = 1000000) {
  long double s = 0;
  for (long n = K - 1; n >= 0; --n) s += std::pow(1.0L / (n + x), p);
  const long double a = K + x;
  if (p == 2) {
    s += 1 / a + 1 / (2 * a * a) + 1 / (6 * a * a * a);
  } else {
    s += 1 / (2 * a * a) + 1 / (2 * a * a * a) + 1 / (4 * a * a * a * a);
  }
  return static_cast<double>(s);
}

inline double trigamma_series(double x) { return zeta_series(2, x); }
inline double tetragamma_series(double x) { return -2.0 * zeta_series(3, x); }

// Trapezoid-integrated CDF of an unnormalized density on [lo, hi].
struct TabulatedCdf {
  double lo, hi, h;
  std::vector<double> cum;
  double total;
  double first_moment;

  TabulatedCdf(const std::function<double(double)>& density, double lo_, double hi_,
               int n = 1 << 14)
      : lo(lo_), hi(hi_), h((hi_ - lo_) / (n - 1)), cum(n, 0.0) {
    double prev = density(lo), m = 0;
    for (int i = 1; i < n; ++i) {
      const double x = lo + i * h;
      const double cur = density(x);
      cum[i] = cum[i - 1] + 0.5 * h * (prev + cur);
      m += 0.5 * h * ((x - h) * prev + x * cur);
      prev = cur;
    }
    total = cum.back();
    first_moment = m / total;
  }

  double operator()(double x) const {
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    const double pos = (x - lo) / h;
    const auto i = static_cast<std::size_t>(pos);
    const double f = pos - static_cast<double>(i);
    const double c = cum[i] + f * (cum[std::min(i + 1, cum.size() - 1)] - cum[i]);
    return c / total;
  }
};

inline double ks_one_sample(std::vector<double> xs, const std::function<double(double)>& F) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = F(xs[i]);
    d = std::max({d, std::abs((i + 1) / n - f), std::abs(i / n - f)});
  }
  return d;
}

inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

inline double mean(const std::vector<double>& v) {
  long double s = 0;
  for (double x : v) s += x;
  return static_cast<double>(s / v.size());
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  long double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return static_cast<double>(s / (v.size() - 1));
}

}  // namespace oracle
