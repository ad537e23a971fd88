#include "lgle/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>

#include "lgle/gibbs.hpp"
#include "lgle/kpz.hpp"
#include "lgle/polymer.hpp"
#include "lgle/rng.hpp"
#include "lgle/rsk.hpp"
#include "lgle/tracy_widom.hpp"

namespace lgle::acceptance {

using verify::Direction;
using verify::make_report;
using verify::StatReport;

namespace {

constexpr double kTheta = 2.0;
constexpr double kR = 1.0;

struct Ctx {
  const Options& opt;
  std::uint64_t seed(int id) const { return mix64(opt.seed ^ (0x9e3779b97f4a7c15ULL * id)); }
  int n(int full) const { return opt.quick ? std::max(1, full / 5) : full; }
  double ks(double full) const { return opt.quick ? full * std::sqrt(5.0) : full; }
};

// 1 -------------------------------------------------------------------------
void constants(const Ctx&, CriterionResult& out) {
  double worst = 0.0;
  nlohmann::ordered_json per;
  for (double th : {0.5, 1.0, 2.0}) {
    for (double r : {0.5, 1.0, 2.0}) {
      const auto k = kpz::kpz_report(th, r);
      const double m = std::max({k.res_d_series, k.res_kappa_A, k.res_kappa_h, k.res_symmetry});
      worst = std::max(worst, m);
      per.push_back({{"theta", th}, {"r", r}, {"d_cubed", k.res_d_series}, {"kappa_A", k.res_kappa_A},
                     {"kappa_h", k.res_kappa_h}, {"symmetry", k.res_symmetry}});
    }
  }
  auto rep = make_report("max_identity_residual", worst, 1e-9, 9);
  rep.metadata["cases"] = per;
  out.reports.push_back(rep);
}

// 2 -------------------------------------------------------------------------
void oracle_equivalence(const Ctx& c, CriterionResult& out) {
  RngStream rng(c.seed(2), 0);
  double worst = 0.0;
  long compared = 0;
  const int n_disorders = 100;
  for (int rep = 0; rep < n_disorders; ++rep) {
    const double th = 0.5 + 2.5 * rng.uniform();
    const auto d = polymer::sample_disorder(6, 6, th, rng);
    const auto tab = polymer::log_partition(d);
    for (int n = 1; n <= 6; ++n) {
      for (int N = 1; N <= 6; ++N) {
        const double bf = polymer::brute_force_log_tau(d, N, 1, n);
        worst = std::max(worst, std::abs(tab(n, N) - bf) / std::max(1.0, std::abs(bf)));
        ++compared;
      }
    }
  }
  auto rep = make_report("max_relative_log_error", worst, 1e-12, n_disorders);
  rep.metadata["entries_compared"] = compared;
  out.reports.push_back(rep);
}

// 3 -------------------------------------------------------------------------
void chain_vs_brute_force(const Ctx& c, CriterionResult& out) {
  const int N = 3, steps = 6, reps = c.n(20000);
  const std::uint64_t s = c.seed(3);
  std::vector<double> b1(reps), b2(reps);
  verify::parallel_for(reps, c.opt.jobs, [&](std::size_t i) {
    RngStream rng(s, stream_id_of(1, i));
    const auto d = polymer::sample_disorder(steps, N, kTheta, rng);
    const auto z = polymer::compute_z_triangle(d, steps);
    b1[i] = z.log_z(3, 1);
    b2[i] = z.log_z(3, 2);
  });
  // The two chain runs share the dynamics stream and differ only in M.
  auto chain = [&](double M, std::vector<double>& c1, std::vector<double>& c2) {
    c1.assign(reps, 0.0);
    c2.assign(reps, 0.0);
    verify::parallel_for(reps, c.opt.jobs, [&](std::size_t i) {
      RngStream init(s, stream_id_of(2, i));
      RngStream dyn(s, stream_id_of(3, i));
      ZTriangle z = rsk::sample_kbar_init_log(rsk::initial_log_y(N, M), init);
      for (int k = 0; k < steps; ++k) z = rsk::step_pi(z, kTheta, dyn);
      c1[i] = z.log_z(3, 1);
      c2[i] = z.log_z(3, 2);
    });
  };
  std::vector<double> a1, a2, d1, d2;
  chain(30.0, a1, a2);
  chain(60.0, d1, d2);
  const double t = c.ks(0.03);
  const double k1 = verify::ks_two_sample(a1, b1), k2 = verify::ks_two_sample(a2, b2);
  const double k1b = verify::ks_two_sample(d1, b1), k2b = verify::ks_two_sample(d2, b2);
  out.reports.push_back(make_report("ks_log_z31_M30", k1, t, reps));
  out.reports.push_back(make_report("ks_log_z32_M30", k2, t, reps));
  auto r1 = make_report("ks_change_z31_M60", std::abs(k1b - k1), 0.01, reps);
  r1.metadata["ks_M60"] = k1b;
  auto r2 = make_report("ks_change_z32_M60", std::abs(k2b - k2), 0.01, reps);
  r2.metadata["ks_M60"] = k2b;
  out.reports.push_back(r1);
  out.reports.push_back(r2);
}

// 4 -------------------------------------------------------------------------
void gibbs_invariance(const Ctx& c, CriterionResult& out) {
  const int reps = c.n(10000);
  const double t = c.ks(0.02);
  out.reports.push_back(
      verify::gibbs_invariance_check(4, kTheta, 4, 8, reps, c.seed(4), 30.0, false, t, c.opt.jobs));
  const auto ctl =
      verify::gibbs_invariance_check(4, kTheta, 4, 8, reps, c.seed(4), 30.0, true, t, c.opt.jobs);
  auto rep = make_report("control_exceeds_threshold", ctl.statistic, t, reps, Direction::AtLeast);
  rep.metadata = ctl.metadata;
  out.reports.push_back(rep);
}

// 5 -------------------------------------------------------------------------
void monotone(const Ctx& c, CriterionResult& out) {
  const int trials = c.n(10000);
  const std::uint64_t s = c.seed(5);
  out.reports.push_back(verify::monotone_check(kTheta, 8, trials, s, verify::PairMode::Random, false,
                                               c.opt.jobs));
  auto shift = verify::monotone_check(kTheta, 8, trials, s + 1, verify::PairMode::Shift, false,
                                      c.opt.jobs);
  shift.name = "monotone_shift";
  out.reports.push_back(shift);
  const auto ctl = verify::monotone_check(kTheta, 8, trials, s, verify::PairMode::Random, true,
                                          c.opt.jobs);
  auto rep = make_report("control_detects_violations", ctl.statistic, 1.0, trials, Direction::AtLeast);
  rep.metadata = ctl.metadata;
  out.reports.push_back(rep);
}

// 6 -------------------------------------------------------------------------
void sampler_cross_validation(const Ctx& c, CriterionResult& out) {
  const int T = 6, reps = c.n(10000), burn = 1000;
  gibbs::BoundaryData bd;
  bd.T = T;
  bd.x = 0.0;
  bd.y = -1.0;
  bd.z = {0.3, 0.2, -0.4, 0.1, -1.5, 0.0};
  const gibbs::GibbsSampler gs(bd, kTheta);
  const std::uint64_t s = c.seed(6);
  std::vector<std::vector<double>> gc(reps), hb(reps);
  verify::parallel_for(reps, c.opt.jobs, [&](std::size_t i) {
    RngStream rng(s, stream_id_of(1, i));
    gc[i] = gs.sample(rng);
    RngStream h(s, stream_id_of(2, i));
    std::vector<double> cur(T);
    for (int m = 0; m < T; ++m) cur[m] = bd.x + (bd.y - bd.x) * m / (T - 1.0);
    for (int k = 0; k < burn; ++k) cur = gibbs::heat_bath_sweep(std::move(cur), bd, h);
    hb[i] = cur;
  });
  for (int m = 2; m <= T - 1; ++m) {
    std::vector<double> a(reps), b(reps);
    for (int i = 0; i < reps; ++i) {
      a[i] = gc[i][m - 1];
      b[i] = hb[i][m - 1];
    }
    auto rep = make_report("ks_site_" + std::to_string(m), verify::ks_two_sample(a, b), c.ks(0.02), reps);
    rep.metadata["burn_in_sweeps"] = burn;
    out.reports.push_back(rep);
  }
}

// 7, 8, 12 share polymer replicas -------------------------------------------
struct PolymerStats {
  std::map<int, verify::ScanRow> scan;
  std::map<int, double> var_log_z;
  std::map<int, std::map<double, double>> median_w;  // N -> delta -> median
};

PolymerStats polymer_runs(const Ctx& c, bool need_scan, bool need_var, bool need_w) {
  PolymerStats st;
  std::set<int> Ns;
  if (need_scan) Ns.insert({64, 128, 256, 512});
  if (need_var) Ns.insert({64, 128, 256, 512, 1024});
  if (need_w) Ns.insert({128, 256, 512});
  const int reps = c.n(2000);
  for (int N : Ns) {
    const auto rows = verify::simulate_polymer_rows(kTheta, kR, N, reps, c.seed(7), 1.0, c.opt.jobs);
    if (need_scan && N <= 512) st.scan[N] = verify::tw_scan_row(rows);
    if (need_var) {
      double m = 0, v = 0;
      for (std::size_t i = 0; i < rows.rows.size(); ++i) m += rows.log_z(i);
      m /= reps;
      for (std::size_t i = 0; i < rows.rows.size(); ++i) v += (rows.log_z(i) - m) * (rows.log_z(i) - m);
      st.var_log_z[N] = v / (reps - 1);
    }
    if (need_w && N >= 128 && N <= 512) {
      for (double d : {0.1, 0.2, 0.4}) {
        st.median_w[N][d] = verify::median_modulus(rows, 1.0, d, static_cast<std::size_t>(c.n(500)));
      }
    }
  }
  return st;
}

void tracy_widom_limit(const Ctx& c, const PolymerStats& st, CriterionResult& out) {
  std::vector<verify::ScanRow> rows;
  nlohmann::ordered_json per;
  for (const auto& [N, row] : st.scan) {
    rows.push_back(row);
    per.push_back({{"N", N}, {"ks", row.ks}, {"mean", row.mean}, {"var", row.var}, {"replicas", row.replicas}});
  }
  auto inv = make_report("ks_inversions", verify::ks_inversions(rows), 1.0, rows.front().replicas);
  inv.metadata["scan"] = per;
  out.reports.push_back(inv);
  const auto& last = st.scan.at(512);
  out.reports.push_back(make_report("ks_N512", last.ks, c.ks(0.12), last.replicas));
  auto m = make_report("mean_error_N512", std::abs(last.mean + 1.771), 0.25, last.replicas);
  m.metadata["mean"] = last.mean;
  out.reports.push_back(m);
}

void fluctuation_exponent(const Ctx&, const PolymerStats& st, CriterionResult& out) {
  std::vector<std::pair<double, double>> pts;
  nlohmann::ordered_json per;
  for (const auto& [N, v] : st.var_log_z) {
    pts.emplace_back(N, v);
    per.push_back({{"N", N}, {"var_log_z", v}});
  }
  const auto fit = verify::exponent_fit(pts);
  auto rep = make_report("slope_error", std::abs(fit.slope - 2.0 / 3.0), 0.08, static_cast<std::int64_t>(pts.size()));
  rep.metadata["slope"] = fit.slope;
  rep.metadata["slope_se"] = fit.slope_se;
  rep.metadata["r_squared"] = fit.r_squared;
  rep.metadata["variances"] = per;
  out.reports.push_back(rep);
}

void tightness_proxy(const Ctx& c, const PolymerStats& st, CriterionResult& out) {
  const std::vector<double> deltas{0.1, 0.2, 0.4};
  int non_increasing = 0;
  nlohmann::ordered_json per;
  for (const auto& [N, byd] : st.median_w) {
    for (std::size_t k = 1; k < deltas.size(); ++k) non_increasing += !(byd.at(deltas[k]) > byd.at(deltas[k - 1]));
    per.push_back({{"N", N}, {"w_0.1", byd.at(0.1)}, {"w_0.2", byd.at(0.2)}, {"w_0.4", byd.at(0.4)}});
  }
  auto inc = make_report("non_increasing_steps", non_increasing, 0.0, c.n(500));
  inc.metadata["medians"] = per;
  out.reports.push_back(inc);
  for (double d : deltas) {
    double lo = 1e300, hi = 0.0;
    for (const auto& [N, byd] : st.median_w) {
      lo = std::min(lo, byd.at(d));
      hi = std::max(hi, byd.at(d));
    }
    char name[48];
    std::snprintf(name, sizeof name, "relative_spread_delta_%.1f", d);
    auto rep = make_report(name, (hi - lo) / lo, 0.2, c.n(500));
    rep.metadata["min"] = lo;
    rep.metadata["max"] = hi;
    out.reports.push_back(rep);
  }
}

// 9 -------------------------------------------------------------------------
void bridge_midpoint(const Ctx& c, CriterionResult& out) {
  out.reports.push_back(
      verify::bridge_midpoint_check(kTheta, kR, 512, c.n(10000), c.seed(9), c.ks(0.03), c.opt.jobs));
}

// 10 ------------------------------------------------------------------------
void normalizer(const Ctx& c, CriterionResult& out) {
  const double x = 0.0, y = -0.4, z3 = 0.1;
  gibbs::BoundaryData bd;
  bd.T = 3;
  bd.x = x;
  bd.y = y;
  bd.z = {gibbs::kMinusInf, gibbs::kMinusInf, z3};
  const int n = c.n(1000000);
  RngStream rng(c.seed(10), 0);
  const auto est = gibbs::estimate_normalizer(bd, kTheta, static_cast<std::size_t>(n), rng);
  // trapezoid over the middle site on a fine grid
  auto G = [](double u) { return std::exp(-kTheta * u - std::exp(-u) - std::lgamma(kTheta)); };
  const int m = 1 << 16;
  const double lo = -25.0, hi = 35.0, h = (hi - lo) / (m - 1);
  double num = 0, den = 0;
  for (int i = 0; i < m; ++i) {
    const double r = lo + i * h, w = (i == 0 || i == m - 1) ? 0.5 : 1.0;
    const double f = G(r - x) * G(y - r);
    den += w * f;
    num += w * f * std::exp(-std::exp(z3 - r));
  }
  const double want = num / den;
  auto rep = make_report("relative_error", std::abs(est.estimate - want) / want, 0.01, n);
  rep.metadata["estimate"] = est.estimate;
  rep.metadata["std_error"] = est.std_error;
  rep.metadata["quadrature"] = want;
  out.reports.push_back(rep);
}

// 11 ------------------------------------------------------------------------
void tw_self_check(const Ctx&, CriterionResult& out) {
  const auto tab = verify::build_tw_table();
  auto m = make_report("mean_error", std::abs(tab.mean + 1.771087), 1e-3, 1);
  m.metadata["mean"] = tab.mean;
  auto v = make_report("variance_error", std::abs(tab.variance - 0.813195), 1e-3, 1);
  v.metadata["variance"] = tab.variance;
  out.reports.push_back(m);
  out.reports.push_back(v);
  out.reports.push_back(make_report("node_doubling_change", tab.refinement_error, 1e-9, 1));
}

const std::map<int, std::string>& titles() {
  static const std::map<int, std::string> t{
      {1, "constant identities"},
      {2, "log_partition vs path enumeration"},
      {3, "RSK chain vs brute force"},
      {4, "Gibbs invariance of the top curves"},
      {5, "monotone coupling"},
      {6, "grand coupling vs heat bath"},
      {7, "Tracy-Widom one-point limit"},
      {8, "fluctuation exponent"},
      {9, "bridge midpoint Gaussian limit"},
      {10, "normalizer vs quadrature"},
      {11, "Tracy-Widom table self-check"},
      {12, "modulus of continuity stability"},
  };
  return t;
}

}  // namespace

std::vector<CriterionResult> run(const Options& opt,
                                 const std::function<void(const CriterionResult&)>& on_done) {
  const Ctx c{opt};
  auto want = [&](int id) { return opt.only.empty() || opt.only.count(id) > 0; };
  std::unique_ptr<PolymerStats> poly;
  std::vector<CriterionResult> results;
  for (const auto& [id, title] : titles()) {
    if (!want(id)) continue;
    CriterionResult res;
    res.id = id;
    res.title = title;
    const auto t0 = std::chrono::steady_clock::now();
    if ((id == 7 || id == 8 || id == 12) && !poly) {
      poly = std::make_unique<PolymerStats>(polymer_runs(c, want(7), want(8), want(12)));
    }
    switch (id) {
      case 1: constants(c, res); break;
      case 2: oracle_equivalence(c, res); break;
      case 3: chain_vs_brute_force(c, res); break;
      case 4: gibbs_invariance(c, res); break;
      case 5: monotone(c, res); break;
      case 6: sampler_cross_validation(c, res); break;
      case 7: tracy_widom_limit(c, *poly, res); break;
      case 8: fluctuation_exponent(c, *poly, res); break;
      case 9: bridge_midpoint(c, res); break;
      case 10: normalizer(c, res); break;
      case 11: tw_self_check(c, res); break;
      case 12: tightness_proxy(c, *poly, res); break;
      default: break;
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.pass = std::all_of(res.reports.begin(), res.reports.end(), [](const auto& r) { return r.pass; });
    for (auto& r : res.reports) {
      r.metadata["criterion"] = id;
      r.metadata["quick"] = opt.quick;
    }
    if (on_done) on_done(res);
    results.push_back(std::move(res));
  }
  return results;
}

std::string summary_line(const CriterionResult& r) {
  char head[160];
  std::snprintf(head, sizeof head, "[%s] %2d %s (%.1f s)", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str(),
                r.seconds);
  std::string s = head;
  for (const auto& rep : r.reports) {
    char line[200];
    std::snprintf(line, sizeof line, "\n       %-30s %.6g %s %.6g  n=%lld", rep.name.c_str(), rep.statistic,
                  rep.direction == Direction::AtMost ? "<=" : ">=", rep.threshold,
                  static_cast<long long>(rep.n_samples));
    s += line;
    if (!rep.pass) s += "  FAIL";
  }
  return s;
}

}  // namespace lgle::acceptance
