#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "lgle/errors.hpp"
#include "lgle/gibbs.hpp"
#include "lgle/rng.hpp"
#include "oracles.hpp"

using namespace lgle;
using namespace lgle::gibbs;

namespace {

const double kInf = kMinusInf;

double G(double theta, double u) { return std::exp(-theta * u - std::exp(-u) - std::lgamma(theta)); }

// Two-step walk density via the product of two Gamma(theta) variables:
// w = g1 g2 has density 2 w^{theta-1} K_0(2 sqrt w) / Gamma(theta)^2, and s = -log w.
double G2_bessel(double theta, double s) {
  const double w = std::exp(-s);
  return 2.0 * std::pow(w, theta) * std::cyl_bessel_k(0.0, 2.0 * std::sqrt(w)) /
         std::exp(2.0 * std::lgamma(theta));
}

double gk(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

BoundaryData make_bd(std::vector<double> z, double x, double y) {
  BoundaryData b;
  b.T = static_cast<int>(z.size());
  b.x = x;
  b.y = y;
  b.z = std::move(z);
  return b;
}

}  // namespace

TEST_CASE("Boltzmann weight") {
  CHECK(boltzmann_weight({0.3, 1.0, -2.0}, {kInf, kInf, kInf}) == 1.0);
  CHECK(boltzmann_weight({0.0, 1.0, 0.5}, {kInf, 0.7, kInf}) == doctest::Approx(std::exp(-std::exp(0.7))));
  RngStream rng(1, 0);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> c(5), z(5);
    for (int j = 0; j < 5; ++j) {
      c[j] = 4 * rng.normal();
      z[j] = rng.uniform() < 0.3 ? kInf : 4 * rng.normal();
    }
    const double w = boltzmann_weight(c, z);
    CHECK((w >= 0.0 && w <= 1.0));
  }
  CHECK_THROWS_AS(boltzmann_weight({0.0}, {0.0, 0.0}), std::domain_error);
}

TEST_CASE("boundary data validation") {
  CHECK_NOTHROW(BoundaryData::free(2, 0, 0));
  CHECK_THROWS_AS(BoundaryData::free(1, 0, 0), std::domain_error);
  auto b = make_bd({kInf, 0.0, std::nan("")}, 0, 0);
  CHECK_THROWS_AS(b.validate(), std::domain_error);
  b = make_bd({kInf, 0.0}, std::numeric_limits<double>::infinity(), 0);
  CHECK_THROWS_AS(b.validate(), std::domain_error);
}

TEST_CASE("h recursion") {
  const double th = 2.0, c = 0.3;
  numerics::Grid g(c - 20.0, c + 40.0, 4096);
  const auto h1 = compute_h_grid(th, c, {kInf, kInf}, 1, g);
  for (std::size_t i = 0; i < g.n_points; i += 7) {
    const double want = G(th, g.node(i) - c);
    CHECK(std::abs(std::exp(h1.log_values[i]) - want) <= 1e-14 * want + 1e-40 * G(th, -std::log(th)));
  }
  const auto h2 = compute_h_grid(th, c, {kInf, kInf, kInf}, 2, g);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.n_points; ++i) {
    worst = std::max(worst, std::abs(std::exp(h2.log_values[i]) - G2_bessel(th, g.node(i) - c)));
  }
  CHECK(worst < 1e-8);

  // total mass decreases when a bottom entry rises
  auto mass = [&](const std::vector<double>& z) {
    const auto h = compute_h_grid(th, c, z, 3, g);
    double s = 0;
    for (double v : h.log_values) s += std::exp(v);
    return s;
  };
  const double m0 = mass({kInf, kInf, kInf, kInf});
  const double m1 = mass({kInf, kInf, -1.0, kInf});
  const double m2 = mass({kInf, kInf, 0.5, kInf});
  const double m3 = mass({kInf, kInf, 0.5, 1.0});
  CHECK(m0 > m1);
  CHECK(m1 > m2);
  CHECK(m2 > m3);

  numerics::Grid narrow(c - 1.0, c + 1.0, 256);
  CHECK_THROWS_AS(compute_h_grid(th, c, {kInf, kInf}, 1, narrow), GridWindowError);
  CHECK_THROWS_AS(compute_h_grid(th, c, {kInf}, 1, g), std::domain_error);
}

TEST_CASE("conditional CDF") {
  const double th = 2.0, x = 0.0, y = -1.2;
  numerics::Grid g(-25.0, 35.0, 4096);
  const auto F = conditional_cdf(th, x, y, {kInf, kInf}, 1, g);
  auto dens = [&](double r) { return G(th, r - x) * G(th, y - r); };
  const double Z = G2_bessel(th, y - x);
  CHECK(std::abs(gk(dens, -25.0, 35.0) / Z - 1.0) < 1e-10);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.n_points; i += 8) {
    const double s = g.node(i);
    const double want = s <= -25.0 ? 0.0 : gk(dens, -25.0, s) / Z;
    worst = std::max(worst, std::abs(F.cdf(s) - want));
  }
  CHECK(worst < 1e-8);
  CHECK(F.cdf(-1e9) == 0.0);
  CHECK(F.cdf(1e9) == 1.0);

  // raising (x, y, z) lowers F pointwise
  const auto Fa = conditional_cdf(th, 0.0, 0.0, {kInf, -0.5, 0.0}, 2, g);
  const auto Fb = conditional_cdf(th, 0.2, 0.1, {kInf, -0.4, 0.3}, 2, g);
  for (std::size_t i = 0; i < g.n_points; i += 3) CHECK(Fb.cdf(g.node(i)) <= Fa.cdf(g.node(i)) + 1e-12);
}

TEST_CASE("grand coupling basics") {
  const auto two = grand_coupling_sample(BoundaryData::free(2, 0.4, -0.3), 2.0, {});
  CHECK(two == std::vector<double>{0.4, -0.3});
  const auto b = make_bd({kInf, 0.1, -0.5, 1.0, kInf}, 0.0, 0.5);
  const std::vector<double> u{0.2, 0.7, 0.45};
  const auto s1 = grand_coupling_sample(b, 2.0, u);
  const auto s2 = grand_coupling_sample(b, 2.0, u);
  CHECK(s1 == s2);
  CHECK(s1.front() == 0.0);
  CHECK(s1.back() == 0.5);
  CHECK_THROWS_AS(grand_coupling_sample(b, 2.0, {0.5}), std::domain_error);
  CHECK_THROWS_AS(grand_coupling_sample(b, 2.0, {0.5, 0.0, 0.5}), std::domain_error);

  // uniforms drive sites from the right: site T-1 depends only on the last one
  const auto s3 = grand_coupling_sample(b, 2.0, {0.9, 0.1, 0.45});
  CHECK(s3[3] == s1[3]);
  CHECK(s3[2] != s1[2]);
}

TEST_CASE("free bridge marginals, including a strongly tilted one") {
  for (auto [x, y] : {std::pair{0.0, -0.5}, std::pair{0.0, 12.0}, std::pair{3.0, -9.0}}) {
    const auto s = bridge_sampler(3, x, y, 2.0);
    RngStream rng(2, static_cast<std::uint64_t>(y * 10 + 100));
    std::vector<double> mid(100000);
    for (auto& v : mid) v = s.sample(rng)[1];
    const double lo = std::min(x, y) - 20, hi = std::max(x, y) + 40;
    oracle::TabulatedCdf F([&](double r) { return G(2.0, r - x) * G(2.0, y - r); }, lo, hi, 1 << 16);
    CHECK(oracle::ks_one_sample(mid, F) < 0.006);
  }
}

TEST_CASE("bridge increments are exchangeable") {
  const auto s = bridge_sampler(6, 0.0, -2.0, 2.0);
  RngStream rng(3, 0);
  std::vector<double> first, last;
  for (int i = 0; i < 100000; ++i) {
    const auto l = s.sample(rng);
    first.push_back(l[1] - l[0]);
    last.push_back(l[5] - l[4]);
  }
  CHECK(oracle::ks_two_sample(first, last) < 0.01);
}

TEST_CASE("grand coupling is monotone") {
  RngStream rng(4, 0);
  int violations = 0, control = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const int T = 3 + static_cast<int>(rng.uniform() * 6);
    BoundaryData a, b;
    a.T = b.T = T;
    a.x = rng.normal();
    a.y = a.x - 0.5 * (T - 1) + 2 * rng.normal();
    b.x = a.x + 2 * rng.uniform();
    b.y = a.y + 2 * rng.uniform();
    for (int m = 0; m < T; ++m) {
      const double za = rng.uniform() < 0.3 ? kInf : a.x - 0.5 * m + 2 * rng.normal();
      a.z.push_back(za);
      const double up = rng.uniform();
      b.z.push_back(up < 0.2 ? za : (za == kInf ? (rng.uniform() < 0.5 ? kInf : a.x - 0.5 * m + 2 * rng.normal())
                                                 : za + 2 * rng.uniform()));
    }
    std::vector<double> u(T - 2), v(T - 2);
    for (auto& e : u) e = rng.uniform();
    for (auto& e : v) e = rng.uniform();
    const auto la = grand_coupling_sample(a, 2.0, u);
    const auto lb = grand_coupling_sample(b, 2.0, u);
    const auto lc = grand_coupling_sample(b, 2.0, v);
    for (int m = 0; m < T; ++m) {
      violations += la[m] > lb[m];
      control += la[m] > lc[m];
    }
  }
  CHECK(violations == 0);
  CHECK(control > 100);
}

TEST_CASE("grand coupling is continuous in its inputs") {
  RngStream rng(5, 0);
  const double delta = 1e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const int T = 3 + static_cast<int>(rng.uniform() * 4);
    BoundaryData b;
    b.T = T;
    b.x = rng.normal();
    b.y = b.x + rng.normal();
    for (int m = 0; m < T; ++m) b.z.push_back(b.x - 1 + rng.normal());
    std::vector<double> u(T - 2);
    for (auto& e : u) e = 0.05 + 0.9 * rng.uniform();
    const auto base = grand_coupling_sample(b, 1.5, u);
    auto probe = [&](BoundaryData bb, std::vector<double> uu) {
      const auto l = grand_coupling_sample(bb, 1.5, uu);
      for (int m = 0; m < T; ++m) worst = std::max(worst, std::abs(l[m] - base[m]) / delta);
    };
    const int which = static_cast<int>(rng.uniform() * 4);
    auto bb = b;
    auto uu = u;
    if (which == 0) bb.x += delta;
    if (which == 1) bb.y += delta;
    if (which == 2) bb.z[1 + static_cast<int>(rng.uniform() * (T - 1))] += delta;
    if (which == 3) uu[static_cast<int>(rng.uniform() * (T - 2))] += delta;
    probe(bb, uu);
  }
  CHECK(worst < 1e3);
}

TEST_CASE("heat bath single-site conditional") {
  const double a = 0.3, b = -0.8, z3 = -0.2;
  auto bd = make_bd({kInf, kInf, z3}, a, b);
  RngStream rng(6, 0);
  std::vector<double> draws(100000);
  for (auto& v : draws) {
    const auto c = heat_bath_sweep({a, 0.0, b}, bd, rng);
    CHECK_FALSE((c[0] != a || c[2] != b));
    v = c[1];
  }
  oracle::TabulatedCdf F(
      [&](double u) { return G(2.0, u - a) * G(2.0, b - u) * std::exp(-std::exp(z3 - u)); }, -20, 40,
      1 << 16);
  CHECK(oracle::ks_one_sample(draws, F) < 0.005);
}

TEST_CASE("heat bath and grand coupling share the stationary law") {
  auto bd = make_bd({kInf, 0.2, -0.4, 0.1, -1.5, 0.0}, 0.0, -1.0);
  const GibbsSampler gs(bd, 2.0);
  RngStream rng(7, 0);
  std::vector<double> gc, hb, one_sweep;
  for (int r = 0; r < 3000; ++r) {
    const auto l = gs.sample(rng);
    gc.push_back(l[2]);
    one_sweep.push_back(heat_bath_sweep(gs.sample(rng), bd, rng)[2]);
    std::vector<double> c(6);
    for (int m = 0; m < 6; ++m) c[m] = bd.x + (bd.y - bd.x) * m / 5.0;
    for (int s = 0; s < 200; ++s) c = heat_bath_sweep(c, bd, rng, s % 2 == 1);
    hb.push_back(c[2]);
  }
  // 99.9% two-sample KS bound at n = m = 3000 is about 0.05
  CHECK(oracle::ks_two_sample(gc, hb) < 0.05);
  CHECK(oracle::ks_two_sample(gc, one_sweep) < 0.05);
}

TEST_CASE("Radon-Nikodym consistency at T = 4") {
  auto bd = make_bd({kInf, 0.3, 0.1, -0.2}, 0.0, -0.6);
  const double c = -0.3;
  const auto free = bridge_sampler(4, bd.x, bd.y, 2.0);
  const GibbsSampler gs(bd, 2.0);
  RngStream rng(8, 0);
  const int n = 100000;
  std::vector<double> w(n), f1(n), f2(n), g1(n), g2(n);
  for (int i = 0; i < n; ++i) {
    const auto l = free.sample(rng);
    w[i] = boltzmann_weight(l, bd.z);
    f1[i] = l[1] * w[i];
    f2[i] = (l[2] > c) * w[i];
    const auto m = gs.sample(rng);
    g1[i] = m[1];
    g2[i] = m[2] > c;
  }
  // ratio estimator standard error by the delta method
  auto ratio_check = [&](const std::vector<double>& fw, const std::vector<double>& g) {
    const double W = oracle::mean(w), est = oracle::mean(fw) / W;
    std::vector<double> resid(n);
    for (int i = 0; i < n; ++i) resid[i] = (fw[i] - est * w[i]) / W;
    const double se1 = std::sqrt(oracle::variance(resid) / n);
    const double se2 = std::sqrt(oracle::variance(g) / n);
    return std::abs(est - oracle::mean(g)) / std::sqrt(se1 * se1 + se2 * se2);
  };
  CHECK(ratio_check(f1, g1) < 3.0);
  CHECK(ratio_check(f2, g2) < 3.0);
}

TEST_CASE("normalizer estimate") {
  RngStream rng(9, 0);
  const auto fr = estimate_normalizer(BoundaryData::free(5, 0.0, 1.0), 2.0, 1000, rng);
  CHECK(fr.estimate == 1.0);
  CHECK(fr.std_error == 0.0);

  const double x = 0.0, y = -0.4, z3 = 0.1, th = 2.0;
  auto bd = make_bd({kInf, kInf, z3}, x, y);
  const auto est = estimate_normalizer(bd, th, 200000, rng);
  CHECK((est.estimate > 0.0 && est.estimate <= 1.0));
  const double num = gk([&](double r) { return G(th, r - x) * G(th, y - r) * std::exp(-std::exp(z3 - r)); },
                        -25, 35);
  const double den = gk([&](double r) { return G(th, r - x) * G(th, y - r); }, -25, 35);
  CHECK(std::abs(est.estimate - num / den) < 4 * est.std_error);
  CHECK(est.std_error / est.estimate < 0.005);
  CHECK_THROWS_AS(estimate_normalizer(bd, th, 0, rng), std::domain_error);
}

TEST_CASE("midpoint of a long bridge") {
  // Brownian scaling at moderate T: (l(T/2) - pT/2)/sqrt(T) ~ N(0, sigma^2/4)
  // with sigma^2 = Psi'(theta') for the tilt that makes p the mean increment.
  const int T = 128;
  const double th = 2.0, p = 0.3;
  const auto s = bridge_sampler(T, 0.0, p * (T - 1), th);
  const double sig2 = oracle::trigamma_series(s.lattice().theta_eff);
  RngStream rng(10, 0);
  std::vector<double> mid;
  for (int i = 0; i < 5000; ++i) {
    const auto l = s.sample(rng);
    mid.push_back((l[T / 2 - 1] - p * (T / 2 - 1)) / std::sqrt(T));
  }
  const double sd = std::sqrt(sig2 * (T / 2 - 1) * (T / 2) / double(T - 1) / T);
  CHECK(oracle::ks_one_sample(mid, [&](double v) { return 0.5 * std::erfc(-v / (sd * std::sqrt(2.0))); }) <
        0.03);
}

TEST_CASE("resample_interior") {
  LineEnsemble e;
  e.index_lo = 3;
  e.index_hi = 9;
  e.curves = {{0, -0.5, -1.1, -1.4, -2.0, -2.6, -3.1}, {-2, -2.6, -3.0, -3.4, -4.2, -4.4, -5.0}};
  RngStream rng(11, 0);
  const auto same = resample_interior(e, 4, 5, 2.0, rng);
  CHECK(same.curves == e.curves);
  const auto r = resample_interior(e, 4, 8, 2.0, rng);
  CHECK(r.curves[1] == e.curves[1]);
  CHECK(r.at(1, 4) == e.at(1, 4));
  CHECK(r.at(1, 8) == e.at(1, 8));
  CHECK(r.at(1, 3) == e.at(1, 3));
  CHECK(r.at(1, 9) == e.at(1, 9));
  CHECK(r.at(1, 6) != e.at(1, 6));
  CHECK_THROWS_AS(resample_interior(e, 2, 5, 2.0, rng), WindowError);
  CHECK_THROWS_AS(resample_interior(e, 5, 5, 2.0, rng), WindowError);
  LineEnsemble one = e;
  one.curves.pop_back();
  CHECK_THROWS_AS(resample_interior(one, 4, 8, 2.0, rng), WindowError);
}
