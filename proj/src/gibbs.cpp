#include "lgle/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lgle/errors.hpp"
#include "lgle/hamiltonians.hpp"
#include "lgle/samplers.hpp"
#include "lgle/special.hpp"

namespace lgle::gibbs {

using numerics::Grid;
using numerics::kLogZero;
using numerics::log_g;

namespace {

constexpr double kKernelCut = 50.0;   // kernel kept where log G >= max - 50
constexpr double kSampleCut = 36.0;   // sampling nodes kept within e^-36 of the mode
constexpr double kTinyRel = 1e-40;    // convolution inputs below this (relative) are skipped
constexpr double kEdgeTol = 1e-12;
constexpr std::size_t kMaxNodes = 4096;

double log_interaction(double z, double r) {
  if (z == kMinusInf) return 0.0;
  return -std::exp(z - r);
}

// Tabulated kernel G_theta(d * step) / max for d in [lo, hi].
struct Kernel {
  int lo = 0;
  int hi = 0;
  double log_max = 0.0;
  std::vector<double> rev;  // rev[t] = value at d = hi - t
};

Kernel make_kernel(double theta, double step) {
  const double mode = -std::log(theta);
  const double lmax = log_g(theta, mode);
  const int dm = static_cast<int>(std::lround(mode / step));
  Kernel k;
  k.lo = dm;
  while (log_g(theta, (k.lo - 1) * step) >= lmax - kKernelCut) --k.lo;
  k.hi = dm;
  while (log_g(theta, (k.hi + 1) * step) >= lmax - kKernelCut) ++k.hi;
  k.log_max = lmax;
  for (int d = k.hi; d >= k.lo; --d) k.rev.push_back(std::exp(log_g(theta, d * step) - lmax));
  return k;
}

// out[j] = sum_i in[i] K(j - i), skipping negligible inputs.
void convolve(const std::vector<double>& in, const Kernel& k, std::vector<double>& out) {
  const int n = static_cast<int>(in.size());
  int a0 = n, a1 = -1;
  for (int i = 0; i < n; ++i) {
    if (in[i] > kTinyRel) {
      a0 = std::min(a0, i);
      a1 = i;
    }
  }
  out.assign(static_cast<std::size_t>(n), 0.0);
  if (a1 < 0) return;
  const int j0 = std::max(0, a0 + k.lo), j1 = std::min(n - 1, a1 + k.hi);
  const int w = static_cast<int>(k.rev.size());
  for (int j = j0; j <= j1; ++j) {
    const int base = j - k.hi;  // in index for t = 0
    const int t0 = std::max(0, a0 - base), t1 = std::min(w - 1, a1 - base);
    double s = 0.0;
    for (int t = t0; t <= t1; ++t) s += in[base + t] * k.rev[t];
    out[j] = s;
  }
}

// Shifts finite log values to max 0 and returns the old max.
double normalize_log(std::vector<double>& lv) {
  const double m = *std::max_element(lv.begin(), lv.end());
  if (!std::isfinite(m)) throw DegenerateDistributionError("gibbs: table vanished in the h-recursion");
  for (double& e : lv) e -= m;
  return m;
}

void check_edges(const std::vector<double>& lv, const char* what) {
  double total = 0.0;
  for (double e : lv) total += std::exp(e);
  if (std::exp(lv.front()) + std::exp(lv.back()) > kEdgeTol * total) {
    throw GridWindowError(std::string(what) + ": grid window too small (edge mass above 1e-12)");
  }
}

struct HTables {
  std::vector<std::vector<double>> log_tabs;  // each with max 0
  std::vector<double> log_scale;              // add back for absolute values
};

// h_1..h_n in log form on nodes lo + i step, kernel G_theta, interaction
// z_{i+1} (1-based z) at step i. The convolution runs in linear space on
// the rescaled previous table; interactions are applied in log space so
// deep tails stay representable.
HTables h_tables(double theta, double c, const std::vector<double>& z, int n, double lo,
                 double step, std::size_t n_nodes) {
  const Kernel k = make_kernel(theta, step);
  HTables out;
  out.log_tabs.reserve(static_cast<std::size_t>(n));
  std::vector<double> lv(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    const double r = lo + static_cast<double>(i) * step;
    lv[i] = log_g(theta, r - c) + log_interaction(z[1], r);
  }
  double acc = normalize_log(lv);
  check_edges(lv, "h-recursion");
  out.log_scale.push_back(acc);
  out.log_tabs.push_back(lv);
  std::vector<double> lin(n_nodes), conv;
  for (int m = 2; m <= n; ++m) {
    const auto& prev = out.log_tabs.back();
    for (std::size_t i = 0; i < n_nodes; ++i) lin[i] = std::exp(prev[i]);
    convolve(lin, k, conv);
    const double zm = z[static_cast<std::size_t>(m)];
    for (std::size_t i = 0; i < n_nodes; ++i) {
      lv[i] = conv[i] > 0.0
                  ? std::log(conv[i]) + log_interaction(zm, lo + static_cast<double>(i) * step)
                  : kLogZero;
    }
    acc += k.log_max + std::log(step) + normalize_log(lv);
    check_edges(lv, "h-recursion");
    out.log_scale.push_back(acc);
    out.log_tabs.push_back(lv);
  }
  return out;
}

// Draws from the piecewise-linear density through p (nodes x0 + i step)
// by exact inversion of its trapezoid CDF.
double invert_linear(const std::vector<double>& p, double x0, double step, double u,
                     std::vector<double>& cum) {
  const std::size_t n = p.size();
  cum.assign(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) cum[i] = cum[i - 1] + 0.5 * step * (p[i - 1] + p[i]);
  if (n < 2 || !(cum.back() > 0.0)) {
    throw DegenerateDistributionError("gibbs: conditional density vanishes");
  }
  const double target = u * cum.back();
  auto it = std::upper_bound(cum.begin(), cum.end(), target);
  if (it == cum.end()) return x0 + static_cast<double>(n - 1) * step;
  std::size_t i = static_cast<std::size_t>(it - cum.begin());
  i = i == 0 ? 0 : i - 1;
  const double r = target - cum[i];
  const double slope = (p[i + 1] - p[i]) / step;
  const double disc = std::max(0.0, p[i] * p[i] + 2.0 * slope * r);
  const double denom = p[i] + std::sqrt(disc);
  const double s = denom > 0.0 ? std::clamp(2.0 * r / denom, 0.0, step) : 0.0;
  return x0 + static_cast<double>(i) * step + s;
}

}  // namespace

BoundaryData BoundaryData::free(int T, double x, double y) {
  BoundaryData b;
  b.T = T;
  b.x = x;
  b.y = y;
  b.z.assign(static_cast<std::size_t>(std::max(T, 0)), kMinusInf);
  b.validate();
  return b;
}

void BoundaryData::validate() const {
  if (T < 2) throw std::domain_error("BoundaryData: need T >= 2");
  if (!std::isfinite(x) || !std::isfinite(y)) throw std::domain_error("BoundaryData: x, y must be finite");
  if (static_cast<int>(z.size()) != T) throw std::domain_error("BoundaryData: z must have T entries");
  for (double v : z) {
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
      throw std::domain_error("BoundaryData: z entries must be finite or -inf");
    }
  }
}

double log_boltzmann_weight(const std::vector<double>& curve, const std::vector<double>& z) {
  if (curve.size() != z.size()) throw std::domain_error("boltzmann_weight: size mismatch");
  double s = 0.0;
  for (std::size_t m = 1; m < curve.size(); ++m) s += numerics::h_int(z[m] - curve[m - 1]);
  return -s;
}

double boltzmann_weight(const std::vector<double>& curve, const std::vector<double>& z) {
  return std::exp(log_boltzmann_weight(curve, z));
}

Grid compute_h_grid(double theta, double c, const std::vector<double>& z, int n, const Grid& grid) {
  if (n < 1) throw std::domain_error("compute_h_grid: n must be >= 1");
  if (static_cast<int>(z.size()) < n + 1) throw std::domain_error("compute_h_grid: need n + 1 z entries");
  grid.validate();
  const auto t = h_tables(theta, c, z, n, grid.lo, grid.step(), grid.n_points);
  Grid out(grid.lo, grid.hi, grid.n_points);
  const auto& v = t.log_tabs.back();
  for (std::size_t i = 0; i < v.size(); ++i) out.log_values[i] = v[i] + t.log_scale.back();
  return out;
}

numerics::PiecewiseLinearCdf conditional_cdf(double theta, double x, double y,
                                             const std::vector<double>& z, int k,
                                             const Grid& grid) {
  const Grid h = compute_h_grid(theta, x, z, k, grid);
  std::vector<double> lv(h.n_points);
  for (std::size_t i = 0; i < lv.size(); ++i) lv[i] = h.log_values[i] + log_g(theta, y - h.node(i));
  numerics::PiecewiseLinearCdf F(grid.lo, grid.step(), lv, true);
  if (F.edge_mass() > kEdgeTol) throw GridWindowError("conditional_cdf: grid window too small");
  return F;
}

Lattice make_lattice(const BoundaryData& b, double theta) {
  b.validate();
  if (!(theta > 0.0)) throw std::domain_error("gibbs: theta must be positive");
  Lattice L;
  const double p = (b.y - b.x) / (b.T - 1);
  L.theta_eff = numerics::digamma_inv(-p);
  const double sig = std::sqrt(numerics::trigamma(theta));
  const double sig_eff = std::sqrt(numerics::trigamma(L.theta_eff));
  const double w = 12.0 * sig_eff * std::sqrt(static_cast<double>(b.T));
  double top = std::max(b.x, b.y);
  for (double v : b.z) {
    if (v != kMinusInf) top = std::max(top, v);
  }
  const double lower = std::min(b.x, b.y) - w;
  const double upper = top + w + 30.0 / L.theta_eff;
  // Refine in powers of two when the tilted kernel is much narrower.
  double step = sig / 12.0;
  while (sig_eff < 0.75 * step * 12.0) step *= 0.5;
  step = std::max(step, (upper - lower) / static_cast<double>(kMaxNodes - 2));
  L.step = step;
  L.lo = std::floor(lower / step) * step;
  L.n = static_cast<std::size_t>(std::ceil((upper - L.lo) / step)) + 1;
  L.n = std::min(L.n, kMaxNodes);
  return L;
}

GibbsSampler::GibbsSampler(const BoundaryData& b, double theta)
    : b_(b), theta_(theta), lat_(make_lattice(b, theta)) {
  if (b_.T <= 2) return;
  // q_j = h_j^{x, z'} with z'_i = z(i + 1)
  std::vector<double> zs(b_.z.begin() + 1, b_.z.end());
  auto t = h_tables(lat_.theta_eff, b_.x, zs, b_.T - 2, lat_.lo, lat_.step, lat_.n);
  for (auto& lv : t.log_tabs) {
    LogTable q;
    const int n = static_cast<int>(lv.size());
    q.a0 = 0;
    while (q.a0 < n && !std::isfinite(lv[q.a0])) ++q.a0;
    q.a1 = n - 1;
    while (q.a1 >= 0 && !std::isfinite(lv[q.a1])) --q.a1;
    q.lv = std::move(lv);
    q_.push_back(std::move(q));
  }
}

double GibbsSampler::draw_site(int k, double xi, double u) const {
  // Density on nodes: q_{k-1}(r) G(xi - r), log-concave in r. Locate its
  // mode by ternary search and keep nodes within e^{-36} of it.
  const auto& q = q_[static_cast<std::size_t>(k - 2)];
  const double h = lat_.step, te = lat_.theta_eff;
  int lo = q.a0;
  int hi = std::min(q.a1, static_cast<int>(std::floor((xi + 700.0 - lat_.lo) / h)));
  if (hi < lo) throw DegenerateDistributionError("gibbs: conditional density vanishes");
  auto f = [&](int j) {
    const double d = xi - lat_.node(static_cast<std::size_t>(j));
    return q.lv[static_cast<std::size_t>(j)] - te * d - std::exp(-d);
  };
  int a = lo, b = hi;
  while (b - a > 2) {
    const int m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
    if (f(m1) < f(m2)) {
      a = m1 + 1;
    } else {
      b = m2;
    }
  }
  int mode = a;
  double fmax = f(a);
  for (int j = a + 1; j <= b; ++j) {
    const double v = f(j);
    if (v > fmax) {
      fmax = v;
      mode = j;
    }
  }
  if (!std::isfinite(fmax)) throw DegenerateDistributionError("gibbs: conditional density vanishes");
  thread_local std::vector<double> left, right, p, cum;
  left.clear();
  right.clear();
  for (int j = mode - 1; j >= lo; --j) {
    const double v = f(j) - fmax;
    if (v < -kSampleCut) break;
    left.push_back(v);
  }
  for (int j = mode + 1; j <= hi; ++j) {
    const double v = f(j) - fmax;
    if (v < -kSampleCut) break;
    right.push_back(v);
  }
  const int j0 = mode - static_cast<int>(left.size());
  const int j1 = mode + static_cast<int>(right.size());
  const double log_tol = std::log(kEdgeTol);
  if ((j0 == 0 && (left.empty() || left.back() > log_tol)) ||
      (j1 == static_cast<int>(lat_.n) - 1 && (right.empty() || right.back() > log_tol))) {
    throw GridWindowError("grand coupling: conditional mass reaches the grid edge");
  }
  p.clear();
  for (auto it = left.rbegin(); it != left.rend(); ++it) p.push_back(std::exp(*it));
  p.push_back(1.0);
  for (double v : right) p.push_back(std::exp(v));
  if (p.size() < 2) {
    // all mass on one node: the density is far narrower than the lattice
    return lat_.node(static_cast<std::size_t>(mode));
  }
  return invert_linear(p, lat_.node(static_cast<std::size_t>(j0)), h, u, cum);
}

std::vector<double> GibbsSampler::sample(const std::vector<double>& uniforms) const {
  const int T = b_.T;
  if (static_cast<int>(uniforms.size()) != T - 2) {
    throw std::domain_error("grand_coupling_sample: need T - 2 uniforms");
  }
  for (double u : uniforms) {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("grand_coupling_sample: uniforms must lie in (0, 1)");
  }
  std::vector<double> l(static_cast<std::size_t>(T));
  l[0] = b_.x;
  l[T - 1] = b_.y;
  for (int k = T - 1; k >= 2; --k) l[k - 1] = draw_site(k, l[k], uniforms[k - 2]);
  return l;
}

std::vector<double> GibbsSampler::sample(RngStream& rng) const {
  std::vector<double> u(static_cast<std::size_t>(b_.T - 2));
  for (auto& v : u) v = rng.uniform();
  return sample(u);
}

std::vector<double> grand_coupling_sample(const BoundaryData& b, double theta,
                                          const std::vector<double>& uniforms) {
  b.validate();
  if (static_cast<int>(uniforms.size()) != b.T - 2) {
    throw std::domain_error("grand_coupling_sample: need T - 2 uniforms");
  }
  if (b.T == 2) return {b.x, b.y};
  return GibbsSampler(b, theta).sample(uniforms);
}

GibbsSampler bridge_sampler(int T, double x, double y, double theta) {
  return GibbsSampler(BoundaryData::free(T, x, y), theta);
}

std::vector<double> bridge_sample(int T, double x, double y, double theta, RngStream& rng) {
  return bridge_sampler(T, x, y, theta).sample(rng);
}

NormalizerEstimate estimate_normalizer(const BoundaryData& b, double theta, std::size_t n_samples,
                                       RngStream& rng) {
  if (n_samples < 1) throw std::domain_error("estimate_normalizer: need n_samples >= 1");
  b.validate();
  const GibbsSampler s = bridge_sampler(b.T, b.x, b.y, theta);
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double w = boltzmann_weight(s.sample(rng), b.z);
    sum += w;
    sum2 += w * w;
  }
  const double n = static_cast<double>(n_samples);
  const double mean = sum / n;
  const double var = n > 1 ? std::max(0.0, (sum2 - n * mean * mean) / (n - 1)) : 0.0;
  return {mean, std::sqrt(var / n)};
}

std::vector<double> heat_bath_sweep(std::vector<double> curve, const BoundaryData& b,
                                    RngStream& rng, bool random_scan) {
  b.validate();
  const int T = b.T;
  if (static_cast<int>(curve.size()) != T) throw std::domain_error("heat_bath_sweep: curve must have T entries");
  auto update = [&](int m) {
    const double lchi = std::numbers::ln2 + numerics::log_add_exp(curve[m - 2], b.z[m]);
    const double lpsi = std::numbers::ln2 - curve[m];
    curve[m - 1] = numerics::sample_log_gig0(lchi, lpsi, rng);
  };
  if (T <= 2) return curve;
  if (random_scan) {
    for (int i = 0; i < T - 2; ++i) {
      update(2 + static_cast<int>(rng.uniform() * (T - 2)));
    }
  } else {
    for (int m = 2; m <= T - 1; ++m) update(m);
  }
  return curve;
}

LineEnsemble resample_interior(const LineEnsemble& ens, int a, int b, double theta, RngStream& rng) {
  if (ens.num_curves() < 2) throw WindowError("resample_interior: need curves 1 and 2");
  if (a < ens.index_lo || b > ens.index_hi || a >= b) {
    throw WindowError("resample_interior: window [a, b] outside the ensemble");
  }
  LineEnsemble out = ens;
  if (b == a + 1) return out;
  BoundaryData bd;
  bd.T = b - a + 1;
  bd.x = ens.at(1, a);
  bd.y = ens.at(1, b);
  for (int j = a; j <= b; ++j) bd.z.push_back(ens.at(2, j));
  const auto l = GibbsSampler(bd, theta).sample(rng);
  for (int j = a + 1; j < b; ++j) out.at(1, j) = l[j - a];
  return out;
}

}  // namespace lgle::gibbs
