#include "lgle/polymer.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "lgle/errors.hpp"
#include "lgle/grid.hpp"
#include "lgle/kpz.hpp"
#include "lgle/samplers.hpp"
#include "lgle/special.hpp"

namespace lgle::polymer {

using numerics::kLogZero;
using numerics::log_add_exp;

namespace {

void check_dims(int n_cols, int n_rows, double theta) {
  if (n_cols < 1 || n_rows < 1) throw std::domain_error("polymer: dimensions must be >= 1");
  if (!(theta > 0.0)) throw std::domain_error("polymer: theta must be positive");
}

}  // namespace

DisorderMatrix DisorderMatrix::transposed() const {
  DisorderMatrix t;
  t.n_cols = n_rows;
  t.n_rows = n_cols;
  t.theta = theta;
  t.log_weights.resize(log_weights.size());
  for (int j = 1; j <= n_rows; ++j) {
    for (int i = 1; i <= n_cols; ++i) t.at(j, i) = (*this)(i, j);
  }
  return t;
}

DisorderMatrix sample_disorder(int n_cols, int n_rows, double theta, RngStream& rng) {
  check_dims(n_cols, n_rows, theta);
  DisorderMatrix d;
  d.n_cols = n_cols;
  d.n_rows = n_rows;
  d.theta = theta;
  d.log_weights.resize(static_cast<std::size_t>(n_cols) * n_rows);
  for (auto& w : d.log_weights) w = numerics::sample_log_inverse_gamma(theta, rng);
  return d;
}

LogPartitionTable log_partition(const DisorderMatrix& d) {
  check_dims(d.n_cols, d.n_rows, d.theta);
  LogPartitionTable t;
  t.n_cols = d.n_cols;
  t.n_rows = d.n_rows;
  t.values.assign(d.log_weights.size(), kLogZero);
  const std::size_t w = static_cast<std::size_t>(d.n_cols);
  for (int j = 1; j <= d.n_rows; ++j) {
    for (int i = 1; i <= d.n_cols; ++i) {
      const std::size_t idx = (j - 1) * w + (i - 1);
      double prev;
      if (i == 1 && j == 1) {
        prev = 0.0;
      } else if (i == 1) {
        prev = t.values[idx - w];
      } else if (j == 1) {
        prev = t.values[idx - 1];
      } else {
        prev = log_add_exp(t.values[idx - 1], t.values[idx - w]);
      }
      t.values[idx] = prev + d.log_weights[idx];
    }
  }
  return t;
}

std::vector<double> simulate_log_partition_row(int n_cols, int n_rows, double theta,
                                               RngStream& rng) {
  check_dims(n_cols, n_rows, theta);
  std::vector<double> z(static_cast<std::size_t>(n_cols));
  for (int j = 1; j <= n_rows; ++j) {
    for (int i = 0; i < n_cols; ++i) {
      const double lw = numerics::sample_log_inverse_gamma(theta, rng);
      double prev;
      if (j == 1) {
        prev = i == 0 ? 0.0 : z[i - 1];
      } else {
        prev = i == 0 ? z[0] : log_add_exp(z[i - 1], z[i]);
      }
      z[i] = prev + lw;
    }
  }
  return z;
}

double brute_force_log_tau(const DisorderMatrix& d, int k, int l, int n, double max_tuples) {
  if (!(1 <= l && l <= k && k <= d.n_rows && n >= 0 && n <= d.n_cols)) {
    throw std::domain_error("brute_force_log_tau: need 1 <= l <= k <= n_rows, n <= n_cols");
  }
  if (n < l) return kLogZero;
  if (n * k > 64) throw SizeGuardError("brute_force_log_tau: region exceeds 64 cells");
  // Upper bound on the enumeration: product of single-path counts.
  double bound = 1.0;
  for (int r = 1; r <= l; ++r) {
    const int right = n - 1, up = k - l;
    bound *= std::exp(std::lgamma(right + up + 1.0) - std::lgamma(right + 1.0) -
                      std::lgamma(up + 1.0));
  }
  if (bound > max_tuples) {
    throw SizeGuardError("brute_force_log_tau: enumeration bound " + std::to_string(bound) +
                         " exceeds the cap");
  }

  auto bit = [n](int i, int j) { return std::uint64_t{1} << ((j - 1) * n + (i - 1)); };
  double total = kLogZero;

  // Depth-first over paths r = 1..l, each avoiding cells used by earlier paths.
  std::function<void(int, std::uint64_t, double)> place_path;
  std::function<void(int, int, int, std::uint64_t, std::uint64_t, double)> walk;
  walk = [&](int r, int i, int j, std::uint64_t used, std::uint64_t path, double lw) {
    const std::uint64_t b = bit(i, j);
    if (used & b) return;
    path |= b;
    lw += d(i, j);
    const int end_j = k + r - l;
    if (i == n && j == end_j) {
      place_path(r + 1, used | path, lw);
      return;
    }
    if (i < n) walk(r, i + 1, j, used, path, lw);
    if (j < end_j) walk(r, i, j + 1, used, path, lw);
  };
  place_path = [&](int r, std::uint64_t used, double lw) {
    if (r > l) {
      total = log_add_exp(total, lw);
      return;
    }
    walk(r, 1, r, used, 0, lw);
  };
  place_path(1, 0, 0.0);
  return total;
}

ZTriangle compute_z_triangle(const DisorderMatrix& d, int n) {
  if (n < 1 || n > d.n_cols) throw std::domain_error("compute_z_triangle: n out of range");
  ZTriangle z;
  z.log_rows.resize(static_cast<std::size_t>(d.n_rows));
  for (int k = 1; k <= d.n_rows; ++k) {
    const int m = std::min(k, n);
    auto& row = z.row(k);
    row.resize(static_cast<std::size_t>(m));
    double prev = 0.0;
    for (int l = 1; l <= m; ++l) {
      const double t = brute_force_log_tau(d, k, l, n);
      row[l - 1] = t - prev;
      prev = t;
    }
  }
  return z;
}

double rescaled_free_energy(double logZ, int n, int N, double theta) {
  if (n < 1 || N < 1) throw std::domain_error("rescaled_free_energy: n, N must be >= 1");
  const double x = static_cast<double>(n) / N;
  return (logZ + N * kpz::h_theta(theta, x)) / (std::cbrt(static_cast<double>(N)) * kpz::d_theta(theta, x));
}

int profile_half_width(int N, double T) {
  return static_cast<int>(std::floor(T * std::pow(static_cast<double>(N), 2.0 / 3.0) + 1.0));
}

PiecewiseLinear rescaled_profile(const std::vector<double>& logZ_row, int N, double theta,
                                 double r, double T) {
  if (N < 1 || !(T > 0.0) || !(r > 0.0)) throw std::domain_error("rescaled_profile: bad arguments");
  const double n23 = std::pow(static_cast<double>(N), 2.0 / 3.0);
  const double n13 = std::cbrt(static_cast<double>(N));
  const int J = profile_half_width(N, T);
  const long center = static_cast<long>(std::floor(r * N));
  if (center - J < 1 || center + J > static_cast<long>(logZ_row.size())) {
    throw WindowError("rescaled_profile: row does not cover the lattice window");
  }
  const double h = kpz::h_theta(theta, r);
  const double hp = kpz::h_theta_derivs(theta, r).h_prime;
  std::vector<double> xs, ys;
  for (int j = -J; j <= J; ++j) {
    xs.push_back(j / n23);
    ys.push_back((logZ_row[center + j - 1] + h * N + hp * j) / n13);
  }
  const PiecewiseLinear full(xs, ys);
  std::vector<double> cx{-T}, cy{full(-T)};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] > -T && xs[i] < T) {
      cx.push_back(xs[i]);
      cy.push_back(ys[i]);
    }
  }
  cx.push_back(T);
  cy.push_back(full(T));
  return PiecewiseLinear(cx, cy);
}

PiecewiseLinear rescaled_profile_airy(const std::vector<double>& logZ_row, int N, double theta,
                                      double r) {
  if (N < 2 || !(r > 0.0)) throw std::domain_error("rescaled_profile_airy: bad arguments");
  const double n23 = std::pow(static_cast<double>(N), 2.0 / 3.0);
  const double n13 = std::cbrt(static_cast<double>(N));
  const long Tt = static_cast<long>(std::floor(n23 * std::log(static_cast<double>(N))));
  const long center = static_cast<long>(std::floor(r * N));
  if (r * N < Tt + 2.0) throw WindowError("rescaled_profile_airy: N too small for the window");
  if (center - Tt < 1 || center + Tt > static_cast<long>(logZ_row.size())) {
    throw WindowError("rescaled_profile_airy: row does not cover the lattice window");
  }
  const auto k = kpz::kpz_report(theta, r);
  const double scale = 1.0 / (std::sqrt(2.0) * k.d * n13);
  std::vector<double> xs, ys;
  for (long j = -Tt; j <= Tt; ++j) {
    xs.push_back(j / (k.kappa * n23));
    ys.push_back(scale * (logZ_row[center + j - 1] + k.h * N + k.h_prime * j));
  }
  return PiecewiseLinear(xs, ys, true);
}

}  // namespace lgle::polymer
