#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "lgle/grid.hpp"
#include "lgle/line_ensemble.hpp"
#include "lgle/rng.hpp"

namespace lgle::gibbs {

inline constexpr double kMinusInf = -std::numeric_limits<double>::infinity();

/// Single-curve boundary data on sites 1..T: entry x at site 1, exit y at
/// site T, bottom curve z[m-1] = z(m) (entries may be kMinusInf).
struct BoundaryData {
  int T = 2;
  double x = 0.0;
  double y = 0.0;
  std::vector<double> z;

  static BoundaryData free(int T, double x, double y);
  void validate() const;
};

/// Site m of the curve interacts with z(m + 1); the sum runs over
/// m = 1..T-1 (the m = 1 term is constant given x).
double log_boltzmann_weight(const std::vector<double>& curve, const std::vector<double>& z);
double boltzmann_weight(const std::vector<double>& curve, const std::vector<double>& z);

/// h_n^{c,z} on the nodes of `grid` (kernel G_theta, trapezoid convolution).
/// z uses the 1-based indexing of the recursion: z[i - 1] = z_i, size >= n + 1,
/// and the factor at step i is e^{-H(z_{i+1} - x_i)}.
/// Throws GridWindowError if the end nodes carry more than 1e-12 of the mass.
numerics::Grid compute_h_grid(double theta, double c, const std::vector<double>& z, int n,
                              const numerics::Grid& grid);

/// CDF of r under the density proportional to h_k^{x,z}(r) G(y - r) on the
/// nodes of `grid`, with end-corrected cell masses.
numerics::PiecewiseLinearCdf conditional_cdf(double theta, double x, double y,
                                             const std::vector<double>& z, int k,
                                             const numerics::Grid& grid);

/// Lattice shared by every boundary with the same theta and comparable
/// extent: spacing sqrt(Psi'(theta))/12 (coarsened to keep <= 4096 nodes),
/// anchored at 0.
struct Lattice {
  double lo = 0.0;
  double step = 1.0;
  std::size_t n = 2;
  double theta_eff = 1.0;  // tilted kernel G_{theta_eff}; same bridge law
  double node(std::size_t i) const { return lo + static_cast<double>(i) * step; }
};

Lattice make_lattice(const BoundaryData& b, double theta);

/// Grand monotone coupling for one boundary. Builds the h tables once;
/// each sample then costs O(T * kernel support).
///
/// Site k (2 <= k <= T-1) given site k+1 = xi has density proportional to
/// q_{k-1}(r) G(xi - r), where q_j is the weight of site j+1 given x with
/// interactions z(3..j+2). Site T-1 is drawn first from uniforms[T-3];
/// site k uses uniforms[k-2].
class GibbsSampler {
 public:
  GibbsSampler(const BoundaryData& b, double theta);

  std::vector<double> sample(const std::vector<double>& uniforms) const;
  std::vector<double> sample(RngStream& rng) const;

  const BoundaryData& boundary() const { return b_; }
  const Lattice& lattice() const { return lat_; }
  double theta() const { return theta_; }

 private:
  double draw_site(int k, double xi, double u) const;

  struct LogTable {
    std::vector<double> lv;  // log q_j on the lattice, max 0
    int a0 = 0;              // finite entries occupy [a0, a1]
    int a1 = -1;
  };

  BoundaryData b_;
  double theta_;
  Lattice lat_;
  std::vector<LogTable> q_;  // q_[j-1]
};

std::vector<double> grand_coupling_sample(const BoundaryData& b, double theta,
                                          const std::vector<double>& uniforms);

/// H^RW bridge from (1, x) to (T, y).
GibbsSampler bridge_sampler(int T, double x, double y, double theta);
std::vector<double> bridge_sample(int T, double x, double y, double theta, RngStream& rng);

struct NormalizerEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo mean of the Boltzmann weight over free bridges.
NormalizerEstimate estimate_normalizer(const BoundaryData& b, double theta, std::size_t n_samples,
                                       RngStream& rng);

/// One heat-bath sweep over interior sites. Each site is redrawn from its
/// full conditional, which in v = e^u is GIG0 with
/// chi = 2(e^{l(m-1)} + e^{z(m+1)}), psi = 2 e^{-l(m+1)} (theta cancels).
/// Sequential left-to-right unless random_scan, which visits T-2 uniformly
/// chosen interior sites.
std::vector<double> heat_bath_sweep(std::vector<double> curve, const BoundaryData& b,
                                    RngStream& rng, bool random_scan = false);

/// Replaces L_1 on (a, b) by a grand-coupling draw with x = L_1(a),
/// y = L_1(b) and bottom curve L_2 on [a, b].
LineEnsemble resample_interior(const LineEnsemble& ens, int a, int b, double theta,
                               RngStream& rng);

}  // namespace lgle::gibbs
