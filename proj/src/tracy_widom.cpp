#include "lgle/tracy_widom.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "lgle/airy.hpp"
#include "lgle/errors.hpp"

namespace lgle::verify {

namespace {

std::atomic<bool> g_warned{false};

// log |det(A)| sign-aware is unnecessary here: det(I - K) lies in (0, 1].
double lu_det(std::vector<double>& a, int n) {
  double det = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r) {
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    }
    if (piv != c) {
      for (int k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
      det = -det;
    }
    const double d = a[c * n + c];
    det *= d;
    if (d == 0.0) return 0.0;
    for (int r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / d;
      if (f == 0.0) continue;
      for (int k = c + 1; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
    }
  }
  return det;
}

double fredholm_det(double s, int n_nodes) {
  if (s > 40.0) return 1.0;
  const double hi = std::max(s, 0.0) + 14.0;
  const auto q = numerics::gauss_legendre(n_nodes, s, hi);
  const int n = n_nodes;
  std::vector<double> ai(n), aip(n), sw(n);
  for (int i = 0; i < n; ++i) {
    const auto v = numerics::airy_ai(q.nodes[i]);
    ai[i] = v.ai;
    aip[i] = v.aip;
    sw[i] = std::sqrt(q.weights[i]);
  }
  std::vector<double> a(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double k;
      if (i == j) {
        k = aip[i] * aip[i] - q.nodes[i] * ai[i] * ai[i];
      } else {
        k = (ai[i] * aip[j] - aip[i] * ai[j]) / (q.nodes[i] - q.nodes[j]);
      }
      a[i * n + j] = (i == j ? 1.0 : 0.0) - sw[i] * k * sw[j];
    }
  }
  return std::clamp(lu_det(a, n), 0.0, 1.0);
}

}  // namespace

double tw_gue_cdf(double s, int n_nodes) {
  if (std::isnan(s)) throw std::domain_error("tw_gue_cdf: NaN argument");
  if (n_nodes < 4) throw std::domain_error("tw_gue_cdf: need at least 4 nodes");
  if ((s < -10.0 || s > 6.0) && !g_warned.exchange(true)) {
    std::cerr << "warning: tw_gue_cdf evaluated outside [-10, 6]; accuracy not guaranteed\n";
  }
  return fredholm_det(s, n_nodes);
}

TwMoments tw_moments(int n_nodes) {
  // E S = b - int_a^b F, E S^2 = b^2 - int_a^b 2 s F, tails below 1e-15.
  const double a = -10.0, b = 8.0;
  double i0 = 0.0, i1 = 0.0;
  for (int panel = 0; panel < 18; ++panel) {
    const auto q = numerics::gauss_legendre(20, a + panel, a + panel + 1.0);
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      const double f = fredholm_det(q.nodes[i], n_nodes);
      i0 += q.weights[i] * f;
      i1 += q.weights[i] * 2.0 * q.nodes[i] * f;
    }
  }
  const double m = b - i0;
  const double m2 = b * b - i1;
  return {m, m2 - m * m};
}

double TwTable::operator()(double s) const {
  if (s <= s_grid.front()) return 0.0;
  if (s >= s_grid.back()) return 1.0;
  const double h = s_grid[1] - s_grid[0];
  const auto i = static_cast<std::size_t>((s - s_grid.front()) / h);
  const std::size_t j = std::min(i + 1, s_grid.size() - 1);
  const double t = (s - s_grid[i]) / h;
  return cdf[i] + t * (cdf[j] - cdf[i]);
}

TwTable build_tw_table(double spacing, int n_nodes) {
  if (!(spacing > 0.0)) throw std::domain_error("build_tw_table: spacing must be positive");
  TwTable t;
  const int n = static_cast<int>(std::lround(16.0 / spacing));
  for (int i = 0; i <= n; ++i) {
    const double s = -10.0 + 16.0 * i / n;
    t.s_grid.push_back(s);
    t.cdf.push_back(tw_gue_cdf(s, n_nodes));
  }
  for (std::size_t i = 1; i < t.cdf.size(); ++i) t.cdf[i] = std::max(t.cdf[i], t.cdf[i - 1]);
  const auto mom = tw_moments(n_nodes);
  t.mean = mom.mean;
  t.variance = mom.variance;
  const auto fine = tw_moments(2 * n_nodes);
  double err = std::max(std::abs(fine.mean - mom.mean), std::abs(fine.variance - mom.variance));
  for (double s : {-9.0, -6.0, -3.5, -1.77, 0.0, 2.0, 5.0}) {
    err = std::max(err, std::abs(tw_gue_cdf(s, n_nodes) - tw_gue_cdf(s, 2 * n_nodes)));
  }
  t.refinement_error = err;
  if (err > 1e-9) throw NonConvergenceError("build_tw_table: node refinement moved F by more than 1e-9");
  return t;
}

}  // namespace lgle::verify
