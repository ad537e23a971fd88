#pragma once

#include <vector>

namespace lgle::verify {

/// F_GUE(s) = det(I - K_Airy) on L^2(s, inf), by Nystrom discretisation with
/// n_nodes Gauss-Legendre points on [s, max(s, 0) + 14] (the kernel is below
/// e^{-60} beyond). Accurate to ~1e-12 for s in [-10, 6]; outside that range
/// a warning is printed once to stderr.
double tw_gue_cdf(double s, int n_nodes = 64);

struct TwTable {
  std::vector<double> s_grid;
  std::vector<double> cdf;
  double mean = 0.0;
  double variance = 0.0;
  double refinement_error = 0.0;  // max |F_n - F_2n| over a probe set, mean and variance included

  /// Linear interpolation in the table; 0 and 1 outside.
  double operator()(double s) const;
};

/// Tabulates F_GUE on [-10, 6] with the given spacing and computes mean and
/// variance by integrating 1 - F and F by parts over [-10, 8]. Throws
/// NonConvergenceError if doubling the node count moves anything by more
/// than 1e-9.
TwTable build_tw_table(double spacing = 0.01, int n_nodes = 64);

/// Mean and variance only, at a given node count.
struct TwMoments {
  double mean;
  double variance;
};
TwMoments tw_moments(int n_nodes = 64);

}  // namespace lgle::verify
