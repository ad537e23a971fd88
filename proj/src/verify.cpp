#include "lgle/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "lgle/errors.hpp"
#include "lgle/gibbs.hpp"
#include "lgle/kpz.hpp"
#include "lgle/polymer.hpp"
#include "lgle/rsk.hpp"
#include "lgle/special.hpp"
#include "lgle/tracy_widom.hpp"

namespace lgle::verify {

namespace {

// Stream tags, one per check.
constexpr std::uint64_t kTagMonotone = 0x6d6f6e6f;
constexpr std::uint64_t kTagGibbs = 0x67696262;
constexpr std::uint64_t kTagPolymer = 0x706f6c79;
constexpr std::uint64_t kTagBridge = 0x62726964;

const TwTable& tw_table() {
  static const TwTable table = build_tw_table();
  return table;
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::domain_error("median: empty input");
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end());
  const double hi = v[m];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m));
  return 0.5 * (lo + hi);
}

}  // namespace

StatReport make_report(std::string name, double statistic, double threshold, std::int64_t n,
                       Direction dir) {
  StatReport r;
  r.name = std::move(name);
  r.statistic = statistic;
  r.threshold = threshold;
  r.n_samples = n;
  r.direction = dir;
  r.pass = dir == Direction::AtMost ? statistic <= threshold : statistic >= threshold;
  return r;
}

std::string to_json_line(const StatReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["statistic"] = r.statistic;
  j["threshold"] = r.threshold;
  j["direction"] = r.direction == Direction::AtMost ? "at_most" : "at_least";
  j["n_samples"] = r.n_samples;
  j["pass"] = r.pass;
  j["metadata"] = r.metadata;
  return j.dump();
}

double ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::domain_error("ks_one_sample: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return std::min(d, 1.0);
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::domain_error("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == t) ++i;
    while (j < b.size() && b[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double modulus_of_continuity(const PiecewiseLinear& f, double delta) {
  const auto& xs = f.xs();
  const auto& ys = f.ys();
  if (xs.empty()) throw std::domain_error("modulus_of_continuity: empty function");
  const double len = f.hi() - f.lo();
  if (!(delta > 0.0) || delta > len * (1.0 + 1e-12)) {
    throw std::domain_error("modulus_of_continuity: delta must lie in (0, b - a]");
  }
  double w = 0.0;
  const std::size_t n = xs.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n && xs[k] - xs[i] <= delta; ++k) {
      w = std::max(w, std::abs(ys[k] - ys[i]));
    }
    if (xs[i] + delta <= f.hi()) w = std::max(w, std::abs(f(xs[i] + delta) - ys[i]));
    if (xs[i] - delta >= f.lo()) w = std::max(w, std::abs(ys[i] - f(xs[i] - delta)));
  }
  return w;
}

ExponentFit exponent_fit(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 3) throw std::domain_error("exponent_fit: need at least 3 pairs");
  std::vector<double> x, y;
  for (const auto& [N, v] : pairs) {
    if (!(N > 0.0) || !(v > 0.0) || !std::isfinite(N) || !std::isfinite(v)) {
      throw std::domain_error("exponent_fit: N and values must be positive and finite");
    }
    x.push_back(std::log(N));
    y.push_back(std::log(v));
  }
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 1e-300)) throw std::domain_error("exponent_fit: all N are equal");
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - fit.intercept - fit.slope * x[i];
    ssr += e * e;
  }
  fit.r_squared = syy > 0 ? 1.0 - ssr / syy : 1.0;
  fit.slope_se = std::sqrt(ssr / (n - 2.0) / sxx);
  return fit;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!err) err = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  const auto k = static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(jobs), n));
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < k; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

StatReport monotone_check(double theta, int T_max, int n_trials, std::uint64_t seed, PairMode mode,
                          bool independent_uniforms, int jobs) {
  if (T_max < 3 || T_max > 10) throw std::domain_error("monotone_check: T_max must lie in [3, 10]");
  if (n_trials < 1) throw std::domain_error("monotone_check: n_trials must be positive");
  const double inf = gibbs::kMinusInf;
  std::vector<int> viol(static_cast<std::size_t>(n_trials), 0);
  std::vector<int> sites(static_cast<std::size_t>(n_trials), 0);
  parallel_for(viol.size(), jobs, [&](std::size_t t) {
    RngStream rng(seed, stream_id_of(kTagMonotone, t));
    const int T = 3 + static_cast<int>(rng.uniform() * (T_max - 2));
    const double drift = -numerics::digamma(theta);  // mean walk increment
    gibbs::BoundaryData a, b;
    a.T = b.T = T;
    a.x = rng.normal();
    a.y = a.x + drift * (T - 1) + 2 * rng.normal();
    for (int m = 0; m < T; ++m) {
      a.z.push_back(rng.uniform() < 0.3 ? inf : a.x + drift * m - 1 + 2 * rng.normal());
    }
    b = a;
    if (mode == PairMode::Shift) {
      b.x += 1;
      b.y += 1;
      for (auto& z : b.z) z += 1;
    } else if (mode == PairMode::Random) {
      b.x += 2 * rng.uniform();
      b.y += 2 * rng.uniform();
      for (int m = 0; m < T; ++m) {
        const double u = rng.uniform();
        if (u < 0.2) continue;
        if (a.z[m] == inf) {
          if (rng.uniform() < 0.5) b.z[m] = a.x + drift * m - 1 + 2 * rng.normal();
        } else {
          b.z[m] = a.z[m] + 2 * rng.uniform();
        }
      }
    }
    std::vector<double> u(static_cast<std::size_t>(T - 2)), v(u.size());
    for (auto& e : u) e = rng.uniform();
    for (auto& e : v) e = rng.uniform();
    const auto la = gibbs::grand_coupling_sample(a, theta, u);
    const auto lb = gibbs::grand_coupling_sample(b, theta, independent_uniforms ? v : u);
    int count = 0;
    for (int m = 0; m < T; ++m) count += la[m] > lb[m];
    viol[t] = count;
    sites[t] = T;
  });
  long total = 0, total_sites = 0;
  for (std::size_t t = 0; t < viol.size(); ++t) {
    total += viol[t];
    total_sites += sites[t];
  }
  auto rep = make_report(independent_uniforms ? "monotone_control" : "monotone",
                         static_cast<double>(total), 0.0, n_trials);
  rep.metadata["theta"] = theta;
  rep.metadata["T_max"] = T_max;
  rep.metadata["mode"] = mode == PairMode::Random ? "random" : mode == PairMode::Shift ? "shift" : "equal";
  rep.metadata["independent_uniforms"] = independent_uniforms;
  rep.metadata["sites_compared"] = total_sites;
  rep.metadata["seed"] = seed;
  return rep;
}

StatReport gibbs_invariance_check(int N, double theta, int a, int b, int n_replicas,
                                  std::uint64_t seed, double M, bool drop_interaction,
                                  double threshold, int jobs) {
  if (N < 2) throw std::domain_error("gibbs_invariance_check: need N >= 2 curves");
  if (a < 2 || b <= a) throw std::domain_error("gibbs_invariance_check: window must satisfy 2 <= a < b");
  if (n_replicas < 1) throw std::domain_error("gibbs_invariance_check: n_replicas must be positive");
  const int mid = (a + b) / 2;
  std::vector<double> chain(static_cast<std::size_t>(n_replicas)), resampled(chain.size());
  parallel_for(chain.size(), jobs, [&](std::size_t i) {
    RngStream rng(seed, stream_id_of(kTagGibbs, i));
    RngStream rs = rng.child(1);
    const auto trace = rsk::run_chain(N, theta, M, b, rng);
    auto ens = rsk::extract_top_curves(trace, 2, a, b);
    chain[i] = ens.at(1, mid);
    if (drop_interaction) {
      for (auto& v : ens.curves[1]) v = gibbs::kMinusInf;
    }
    resampled[i] = gibbs::resample_interior(ens, a, b, theta, rs).at(1, mid);
  });
  const double ks = ks_two_sample(chain, resampled);
  auto rep = make_report(drop_interaction ? "gibbs_invariance_control" : "gibbs_invariance", ks,
                         threshold, n_replicas);
  rep.metadata["N"] = N;
  rep.metadata["theta"] = theta;
  rep.metadata["window"] = {a, b};
  rep.metadata["midpoint"] = mid;
  rep.metadata["M"] = M;
  rep.metadata["drop_interaction"] = drop_interaction;
  rep.metadata["seed"] = seed;
  return rep;
}

StatReport bridge_midpoint_check(double theta, double r, int T, int draws, std::uint64_t seed,
                                 double threshold, int jobs) {
  if (T < 2 || T % 2 != 0) throw std::domain_error("bridge_midpoint_check: T must be even and >= 2");
  if (draws < 1) throw std::domain_error("bridge_midpoint_check: draws must be positive");
  const double p = -kpz::h_theta_derivs(theta, r).h_prime;
  const double sig2 = kpz::sigma_p_squared(theta, r);
  const auto s = gibbs::bridge_sampler(T + 1, 0.0, p * T, theta);
  std::vector<double> mid(static_cast<std::size_t>(draws));
  parallel_for(mid.size(), jobs, [&](std::size_t i) {
    RngStream rng(seed, stream_id_of(kTagBridge, i));
    const auto l = s.sample(rng);
    mid[i] = (l[static_cast<std::size_t>(T / 2)] - p * T / 2) / std::sqrt(static_cast<double>(T));
  });
  const double sd = std::sqrt(sig2 / 4.0);
  const double ks =
      ks_one_sample(mid, [&](double x) { return 0.5 * std::erfc(-x / (sd * std::sqrt(2.0))); });
  auto rep = make_report("bridge_midpoint", ks, threshold, draws);
  rep.metadata["theta"] = theta;
  rep.metadata["r"] = r;
  rep.metadata["T"] = T;
  rep.metadata["p"] = p;
  rep.metadata["sigma_p2"] = sig2;
  rep.metadata["seed"] = seed;
  return rep;
}

PolymerRows simulate_polymer_rows(double theta, double r, int N, int n_replicas, std::uint64_t seed,
                                  double profile_T, int jobs) {
  if (!(theta > 0.0) || !(r > 0.0) || N < 1 || n_replicas < 1 || profile_T < 0.0) {
    throw std::domain_error("simulate_polymer_rows: bad arguments");
  }
  PolymerRows out;
  out.theta = theta;
  out.r = r;
  out.N = N;
  out.n = static_cast<int>(std::floor(r * N));
  if (out.n < 1) throw std::domain_error("simulate_polymer_rows: floor(rN) must be >= 1");
  out.seed = seed;
  const int extra = profile_T > 0.0 ? polymer::profile_half_width(N, profile_T) + 1 : 0;
  const int n_cols = out.n + extra;
  out.rows.resize(static_cast<std::size_t>(n_replicas));
  parallel_for(out.rows.size(), jobs, [&](std::size_t i) {
    RngStream rng(seed, stream_id_of(kTagPolymer, static_cast<std::uint64_t>(N), i));
    out.rows[i] = polymer::simulate_log_partition_row(n_cols, N, theta, rng);
  });
  return out;
}

ScanRow tw_scan_row(const PolymerRows& rows) {
  std::vector<double> F;
  F.reserve(rows.rows.size());
  for (std::size_t i = 0; i < rows.rows.size(); ++i) {
    F.push_back(polymer::rescaled_free_energy(rows.log_z(i), rows.n, rows.N, rows.theta));
  }
  ScanRow s;
  s.N = rows.N;
  s.replicas = static_cast<int>(F.size());
  s.seed = rows.seed;
  const auto& tw = tw_table();
  s.ks = ks_one_sample(F, [&](double x) { return tw(x); });
  double m = 0;
  for (double v : F) m += v;
  m /= static_cast<double>(F.size());
  double var = 0;
  for (double v : F) var += (v - m) * (v - m);
  s.mean = m;
  s.var = F.size() > 1 ? var / static_cast<double>(F.size() - 1) : 0.0;
  return s;
}

std::vector<ScanRow> tw_convergence_scan(double theta, double r, const std::vector<int>& N_list,
                                         int n_replicas, std::uint64_t seed, int jobs) {
  if (N_list.empty() || !std::is_sorted(N_list.begin(), N_list.end())) {
    throw std::domain_error("tw_convergence_scan: N_list must be nonempty and ascending");
  }
  std::vector<ScanRow> out;
  for (int N : N_list) {
    out.push_back(tw_scan_row(simulate_polymer_rows(theta, r, N, n_replicas, seed, 1.0, jobs)));
  }
  return out;
}

int ks_inversions(const std::vector<ScanRow>& rows) {
  int inv = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) inv += rows[i].ks > rows[i - 1].ks;
  return inv;
}

double median_modulus(const PolymerRows& rows, double T, double delta, std::size_t max_replicas) {
  const std::size_t n = std::min(max_replicas, rows.rows.size());
  std::vector<double> w;
  w.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto f = polymer::rescaled_profile(rows.rows[i], rows.N, rows.theta, rows.r, T);
    w.push_back(modulus_of_continuity(f, delta));
  }
  return median(std::move(w));
}

}  // namespace lgle::verify
