#pragma once

#include <cstdint>
#include <vector>

#include "lgle/line_ensemble.hpp"
#include "lgle/rng.hpp"
#include "lgle/ztriangle.hpp"

namespace lgle::rsk {

struct ChainTrace {
  double theta = 0.0;
  double M = 0.0;
  std::vector<ZTriangle> states;  // states[n] = z(n)
  std::uint64_t variates_drawn = 0;
};

/// log y^{0,M}. The centred form shifts every entry by M(N-1)/4 so that
/// z_{1,1}(0) concentrates near 1; the chain is scale-equivariant and
/// the uncentred form drifts to 0 as M grows.
std::vector<double> initial_log_y(int N, double M, bool centred = true);

/// Intertwining-kernel draw: top row fixed to y, lower rows filled
/// downward with z_{k,l} ~ GIG0(chi = 2 z_{k+1,l+1}, psi = 2 / z_{k+1,l}).
ZTriangle sample_kbar_init(const std::vector<double>& y, double theta, RngStream& rng);
ZTriangle sample_kbar_init_log(const std::vector<double>& log_y, RngStream& rng);

/// One L^k update in linear coordinates.
std::vector<double> step_l_kernel(const std::vector<double>& x, const std::vector<double>& y,
                                  const std::vector<double>& x_tilde, double d);

/// Same map on logs (log d given).
std::vector<double> step_l_kernel_log(const std::vector<double>& lx, const std::vector<double>& ly,
                                      const std::vector<double>& lx_tilde, double log_d);

/// One Pi^N step given the N log-weights (level 1 first).
ZTriangle step_pi_with(const ZTriangle& z, const std::vector<double>& log_d);

/// One Pi^N step drawing N inverse-gamma(theta) weights.
ZTriangle step_pi(const ZTriangle& z, double theta, RngStream& rng);

ChainTrace run_chain(int N, double theta, double M, int n_steps, RngStream& rng);

/// Top-row value log z_{N,i}(n) from a fresh chain, for n = 0..n_steps, keeping
/// only row N. Cheaper than run_chain when the full trace is not needed.
std::vector<std::vector<double>> run_chain_top_row(int N, double theta, double M, int n_steps,
                                                   RngStream& rng);

/// L_i(j) = log z_{N,i}(j), i = 1..K, j in [T0, T1].
LineEnsemble extract_top_curves(const ChainTrace& trace, int K, int T0, int T1);

}  // namespace lgle::rsk
