#pragma once

#include <cstdint>
#include <vector>

#include "lgle/piecewise.hpp"
#include "lgle/rng.hpp"
#include "lgle/ztriangle.hpp"

namespace lgle::polymer {

/// log d_{i,j}, i = column in 1..n_cols, j = row in 1..n_rows.
struct DisorderMatrix {
  int n_cols = 0;
  int n_rows = 0;
  double theta = 0.0;
  std::vector<double> log_weights;  // row-major: (j-1) * n_cols + (i-1)

  double operator()(int i, int j) const {
    return log_weights[static_cast<std::size_t>(j - 1) * n_cols + (i - 1)];
  }
  double& at(int i, int j) { return log_weights[static_cast<std::size_t>(j - 1) * n_cols + (i - 1)]; }
  DisorderMatrix transposed() const;
};

/// Entry (n, N) = log Z^{n,N}.
struct LogPartitionTable {
  int n_cols = 0;
  int n_rows = 0;
  std::vector<double> values;

  double operator()(int n, int N) const {
    return values[static_cast<std::size_t>(N - 1) * n_cols + (n - 1)];
  }
};

/// Draws row by row (j outer, i inner).
DisorderMatrix sample_disorder(int n_cols, int n_rows, double theta, RngStream& rng);

LogPartitionTable log_partition(const DisorderMatrix& d);

/// log Z^{n, n_rows} for n = 1..n_cols without storing the disorder. Uses
/// the same draw order as sample_disorder, so results agree bit for bit.
std::vector<double> simulate_log_partition_row(int n_cols, int n_rows, double theta,
                                               RngStream& rng);

/// Exact log tau_{k,l}(n) by enumerating l-tuples of vertex-disjoint
/// up-right paths from (1, r) to (n, k + r - l). Returns -inf when the
/// set is empty. Throws SizeGuardError when the path-count bound exceeds
/// max_tuples.
double brute_force_log_tau(const DisorderMatrix& d, int k, int l, int n,
                           double max_tuples = 1e7);

/// z_{k,l}(n) = tau_{k,l}(n) / tau_{k,l-1}(n), 1 <= l <= min(k, n).
ZTriangle compute_z_triangle(const DisorderMatrix& d, int n);

/// (log Z + N h(n/N)) / (N^{1/3} d(n/N)).
double rescaled_free_energy(double logZ, int n, int N, double theta);

/// f_N^{LG} on [-T, T]; logZ_row[n-1] = log Z^{n,N}.
PiecewiseLinear rescaled_profile(const std::vector<double>& logZ_row, int N, double theta,
                                 double r, double T);

/// The kappa-rescaled profile on [-A_N, A_N] with constant extension.
PiecewiseLinear rescaled_profile_airy(const std::vector<double>& logZ_row, int N, double theta,
                                      double r);

/// Half-width of the lattice window used by rescaled_profile, in columns.
int profile_half_width(int N, double T);

}  // namespace lgle::polymer
