#include "lgle/rsk.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lgle/errors.hpp"
#include "lgle/samplers.hpp"
#include "lgle/special.hpp"

namespace lgle::rsk {

using numerics::log_add_exp;

std::vector<double> initial_log_y(int N, double M, bool centred) {
  if (N < 1 || !(M > 0.0)) throw std::domain_error("initial_log_y: need N >= 1, M > 0");
  std::vector<double> ly(static_cast<std::size_t>(N));
  const double shift = centred ? M * (N - 1) / 4.0 : 0.0;
  for (int l = 1; l <= N; ++l) ly[l - 1] = -M * (N - l) / 2.0 + shift;
  return ly;
}

ZTriangle sample_kbar_init_log(const std::vector<double>& log_y, RngStream& rng) {
  const int N = static_cast<int>(log_y.size());
  if (N < 1) throw std::domain_error("sample_kbar_init: empty top row");
  for (double v : log_y) {
    if (!std::isfinite(v)) throw std::domain_error("sample_kbar_init: y must be positive");
  }
  ZTriangle z(N);
  z.row(N) = log_y;
  for (int k = N - 1; k >= 1; --k) {
    const auto& up = z.row(k + 1);
    auto& row = z.row(k);
    for (int l = 1; l <= k; ++l) {
      const double log_chi = std::numbers::ln2 + up[l];
      const double log_psi = std::numbers::ln2 - up[l - 1];
      row[l - 1] = numerics::sample_log_gig0(log_chi, log_psi, rng);
    }
  }
  return z;
}

ZTriangle sample_kbar_init(const std::vector<double>& y, double theta, RngStream& rng) {
  if (!(theta > 0.0)) throw std::domain_error("sample_kbar_init: theta must be positive");
  std::vector<double> ly;
  for (double v : y) {
    if (!(v > 0.0)) throw std::domain_error("sample_kbar_init: y must be positive");
    ly.push_back(std::log(v));
  }
  return sample_kbar_init_log(ly, rng);
}

std::vector<double> step_l_kernel_log(const std::vector<double>& lx, const std::vector<double>& ly,
                                      const std::vector<double>& lxt, double log_d) {
  const std::size_t k = ly.size();
  if (k < 2 || lx.size() != k - 1 || lxt.size() != k - 1) {
    throw std::domain_error("step_l_kernel: need |y| = k >= 2 and |x| = |x~| = k - 1");
  }
  std::vector<double> out(k);
  out[0] = log_d + log_add_exp(ly[0], lxt[0]);
  for (std::size_t l = 1; l + 1 < k; ++l) {
    out[l] = ly[l - 1] + lxt[l - 1] - lx[l - 1] + log_add_exp(ly[l], lxt[l]) -
             log_add_exp(ly[l - 1], lxt[l - 1]);
  }
  out[k - 1] = ly[k - 1] + ly[k - 2] + lxt[k - 2] - lx[k - 2] - log_add_exp(ly[k - 2], lxt[k - 2]);
  return out;
}

std::vector<double> step_l_kernel(const std::vector<double>& x, const std::vector<double>& y,
                                  const std::vector<double>& x_tilde, double d) {
  auto logs = [](const std::vector<double>& v) {
    std::vector<double> o;
    for (double e : v) {
      if (!(e > 0.0) || !std::isfinite(e)) throw std::domain_error("step_l_kernel: inputs must be positive");
      o.push_back(std::log(e));
    }
    return o;
  };
  if (!(d > 0.0)) throw std::domain_error("step_l_kernel: d must be positive");
  auto out = step_l_kernel_log(logs(x), logs(y), logs(x_tilde), std::log(d));
  for (double& v : out) v = std::exp(v);
  return out;
}

ZTriangle step_pi_with(const ZTriangle& z, const std::vector<double>& log_d) {
  const int N = z.N();
  if (static_cast<int>(log_d.size()) != N) throw std::domain_error("step_pi: need N weights");
  ZTriangle nz(N);
  nz.row(1)[0] = z.row(1)[0] + log_d[0];
  for (int k = 2; k <= N; ++k) {
    nz.row(k) = step_l_kernel_log(z.row(k - 1), z.row(k), nz.row(k - 1), log_d[k - 1]);
  }
  return nz;
}

ZTriangle step_pi(const ZTriangle& z, double theta, RngStream& rng) {
  std::vector<double> ld(static_cast<std::size_t>(z.N()));
  for (auto& v : ld) v = numerics::sample_log_inverse_gamma(theta, rng);
  return step_pi_with(z, ld);
}

ChainTrace run_chain(int N, double theta, double M, int n_steps, RngStream& rng) {
  if (n_steps < 1) throw std::domain_error("run_chain: n_steps must be >= 1");
  if (!(theta > 0.0)) throw std::domain_error("run_chain: theta must be positive");
  ChainTrace tr;
  tr.theta = theta;
  tr.M = M;
  tr.states.reserve(static_cast<std::size_t>(n_steps) + 1);
  tr.states.push_back(sample_kbar_init_log(initial_log_y(N, M), rng));
  for (int n = 1; n <= n_steps; ++n) {
    tr.states.push_back(step_pi(tr.states.back(), theta, rng));
    tr.variates_drawn += static_cast<std::uint64_t>(N);
  }
  return tr;
}

std::vector<std::vector<double>> run_chain_top_row(int N, double theta, double M, int n_steps,
                                                   RngStream& rng) {
  if (n_steps < 1) throw std::domain_error("run_chain: n_steps must be >= 1");
  std::vector<std::vector<double>> out;
  ZTriangle z = sample_kbar_init_log(initial_log_y(N, M), rng);
  out.push_back(z.row(N));
  for (int n = 1; n <= n_steps; ++n) {
    z = step_pi(z, theta, rng);
    out.push_back(z.row(N));
  }
  return out;
}

LineEnsemble extract_top_curves(const ChainTrace& trace, int K, int T0, int T1) {
  const int n_steps = static_cast<int>(trace.states.size()) - 1;
  const int N = trace.states.empty() ? 0 : trace.states[0].N();
  if (K < 2 || K > N) throw WindowError("extract_top_curves: need 2 <= K <= N");
  if (T0 < K || T1 > n_steps || T0 > T1) {
    throw WindowError("extract_top_curves: window must satisfy K <= T0 <= T1 <= n_steps");
  }
  LineEnsemble le;
  le.index_lo = T0;
  le.index_hi = T1;
  le.curves.assign(static_cast<std::size_t>(K), {});
  for (int i = 1; i <= K; ++i) {
    for (int j = T0; j <= T1; ++j) le.curves[i - 1].push_back(trace.states[j].log_z(N, i));
  }
  return le;
}

}  // namespace lgle::rsk
