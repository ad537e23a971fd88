#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/airy.hpp>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "lgle/airy.hpp"
#include "lgle/errors.hpp"
#include "lgle/rng.hpp"
#include "lgle/tracy_widom.hpp"
#include "lgle/verify.hpp"
#include "oracles.hpp"

using namespace lgle;
using namespace lgle::verify;

namespace {

// det(I - K_Airy) on (s, s + 16) from Boost's Airy functions and 2 x 40
// Gauss-Legendre panels, with plain Gaussian elimination.
double tw_oracle(double s) {
  using GL = boost::math::quadrature::gauss<double, 40>;
  std::vector<double> x, w;
  for (int p = 0; p < 2; ++p) {
    const double a = s + 8.0 * p, h = 4.0, c = a + h;
    const auto& ab = GL::abscissa();
    const auto& wt = GL::weights();
    for (std::size_t i = 0; i < ab.size(); ++i) {
      x.push_back(c - h * ab[i]);
      w.push_back(h * wt[i]);
      x.push_back(c + h * ab[i]);
      w.push_back(h * wt[i]);
    }
  }
  const std::size_t n = x.size();
  std::vector<double> ai(n), aip(n);
  for (std::size_t i = 0; i < n; ++i) {
    ai[i] = boost::math::airy_ai(x[i]);
    aip[i] = boost::math::airy_ai_prime(x[i]);
  }
  std::vector<std::vector<double>> m(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double k = i == j ? aip[i] * aip[i] - x[i] * ai[i] * ai[i]
                              : (ai[i] * aip[j] - aip[i] * ai[j]) / (x[i] - x[j]);
      m[i][j] = (i == j ? 1.0 : 0.0) - std::sqrt(w[i] * w[j]) * k;
    }
  }
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(m[r][c]) > std::abs(m[p][c])) p = r;
    }
    if (p != c) {
      std::swap(m[p], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

PiecewiseLinear random_pl(RngStream& rng, int segments, bool on_grid) {
  std::vector<double> xs{0.0}, ys{rng.normal()};
  for (int i = 1; i < segments; ++i) {
    xs.push_back(on_grid ? std::round(100.0 * i / segments + 5 * (rng.uniform() - 0.5)) / 100.0
                         : (i + 0.8 * (rng.uniform() - 0.5)) / segments);
    ys.push_back(rng.normal());
  }
  xs.push_back(1.0);
  ys.push_back(rng.normal());
  return PiecewiseLinear(xs, ys);
}

}  // namespace

TEST_CASE("Airy functions against Boost") {
  CHECK(numerics::airy_ai(0.0).ai == doctest::Approx(0.355028053887817).epsilon(1e-15));
  double worst = 0.0;
  for (double x = -30.0; x <= 30.0; x += 0.0173) {
    const auto v = numerics::airy_ai(x);
    const double scale = std::max(1.0, std::pow(std::abs(x), 0.75));
    worst = std::max(worst, std::abs(v.ai - boost::math::airy_ai(x)));
    worst = std::max(worst, std::abs(v.aip - boost::math::airy_ai_prime(x)) / scale);
  }
  CHECK(worst < 1e-11);
}

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n - 1 exactly") {
  const auto q = numerics::gauss_legendre(12, -1.0, 3.0);
  for (int p = 0; p < 24; ++p) {
    double s = 0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * std::pow(q.nodes[i], p);
    const double want = (std::pow(3.0, p + 1) - std::pow(-1.0, p + 1)) / (p + 1);
    CHECK(s == doctest::Approx(want).epsilon(1e-13));
  }
}

TEST_CASE("Tracy-Widom GUE distribution") {
  SUBCASE("matches an independent Nystrom oracle") {
    for (double s : {-8.0, -5.0, -3.0, -1.771, -1.0, 0.0, 1.5, 3.0, 5.0}) {
      CHECK(std::abs(tw_gue_cdf(s) - tw_oracle(s)) < 1e-10);
    }
  }
  SUBCASE("monotone with limits 0 and 1") {
    CHECK(tw_gue_cdf(-10.0) < 1e-20);
    CHECK(tw_gue_cdf(6.0) > 1.0 - 1e-6);
    double prev = 0.0;
    for (double s = -9.0; s <= 5.0; s += 0.25) {
      const double f = tw_gue_cdf(s);
      CHECK(f >= prev);
      prev = f;
    }
  }
  SUBCASE("node-count plateau") {
    for (double s : {-6.0, -2.0, 0.0, 2.0}) {
      CHECK(std::abs(tw_gue_cdf(s, 64) - tw_gue_cdf(s, 128)) < 1e-9);
    }
  }
  SUBCASE("table moments") {
    const auto tab = build_tw_table();
    CHECK(tab.refinement_error < 1e-9);
    CHECK(std::abs(tab.mean - (-1.771087)) < 1e-3);
    CHECK(std::abs(tab.variance - 0.813195) < 1e-3);
    CHECK(tab.cdf.front() < 1e-20);
    CHECK(tab.cdf.back() > 1.0 - 1e-6);
    for (std::size_t i = 1; i < tab.cdf.size(); ++i) CHECK(tab.cdf[i] >= tab.cdf[i - 1]);
    CHECK(tab(-1.5) == doctest::Approx(tw_gue_cdf(-1.5)).epsilon(1e-4));
  }
  SUBCASE("bad input") { CHECK_THROWS_AS(tw_gue_cdf(std::nan("")), std::domain_error); }
}

TEST_CASE("KS distances") {
  CHECK(ks_two_sample({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(ks_two_sample({1, 2, 3}, {4, 5}) == 1.0);
  CHECK(ks_two_sample({1, 2, 3}, {1.5, 2.5, 3.5}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(ks_two_sample({}, {1.0}), std::domain_error);
  CHECK_THROWS_AS(ks_one_sample({}, [](double) { return 0.5; }), std::domain_error);

  RngStream rng(21, 0);
  std::vector<double> a, b;
  for (int i = 0; i < 500; ++i) a.push_back(rng.normal());
  for (int i = 0; i < 700; ++i) b.push_back(0.2 + rng.normal());
  const double d = ks_two_sample(a, b);
  CHECK(d == ks_two_sample(b, a));
  CHECK(d == doctest::Approx(oracle::ks_two_sample(a, b)).epsilon(1e-15));
  std::vector<double> ea, eb;
  for (double v : a) ea.push_back(std::exp(3 * v));
  for (double v : b) eb.push_back(std::exp(3 * v));
  CHECK(ks_two_sample(ea, eb) == d);

  auto Phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  CHECK(ks_one_sample(a, Phi) == doctest::Approx(oracle::ks_one_sample(a, Phi)).epsilon(1e-15));
  CHECK(ks_one_sample({0.0}, Phi) == 0.5);
}

TEST_CASE("modulus of continuity") {
  const PiecewiseLinear lin({0.0, 2.0}, {1.0, -2.0});
  CHECK(modulus_of_continuity(lin, 0.4) == doctest::Approx(1.5 * 0.4).epsilon(1e-14));
  const PiecewiseLinear flat({-1.0, 0.0, 1.0}, {3.0, 3.0, 3.0});
  CHECK(modulus_of_continuity(flat, 0.5) == 0.0);
  CHECK_THROWS_AS(modulus_of_continuity(lin, 2.5), std::domain_error);
  CHECK_THROWS_AS(modulus_of_continuity(lin, 0.0), std::domain_error);

  RngStream rng(22, 0);
  SUBCASE("dense-grid brute force on a lattice containing every vertex") {
    for (int rep = 0; rep < 20; ++rep) {
      const auto f = random_pl(rng, 10, true);
      const int k = 100;  // delta = 0.25 on a grid of step 1/400
      double brute = 0.0;
      long pairs = 0;
      for (int i = 0; i <= 400; ++i) {
        for (int j = i; j <= std::min(400, i + k); ++j, ++pairs) {
          brute = std::max(brute, std::abs(f(i / 400.0) - f(j / 400.0)));
        }
      }
      CHECK(pairs >= 10000);
      CHECK(std::abs(modulus_of_continuity(f, 0.25) - brute) < 1e-9);
    }
  }
  SUBCASE("dense grid never exceeds it and converges to it") {
    for (int rep = 0; rep < 10; ++rep) {
      const auto f = random_pl(rng, 10, false);
      const double delta = 0.137;
      double brute = 0.0;
      const int n = 4000;
      const int k = static_cast<int>(delta * n);
      for (int i = 0; i <= n; ++i) {
        for (int j = i; j <= std::min(n, i + k); ++j) {
          brute = std::max(brute, std::abs(f(double(i) / n) - f(double(j) / n)));
        }
      }
      const double w = modulus_of_continuity(f, delta);
      CHECK(brute <= w + 1e-12);
      CHECK(w - brute < 0.01);
    }
  }
  SUBCASE("monotone and subadditive in delta") {
    for (int rep = 0; rep < 20; ++rep) {
      const auto f = random_pl(rng, 15, false);
      double prev = 0.0;
      for (double d = 0.05; d <= 0.5; d += 0.05) {
        const double w = modulus_of_continuity(f, d);
        CHECK(w >= prev);
        prev = w;
        CHECK(modulus_of_continuity(f, 2 * d) <= 2 * w + 1e-12);
      }
    }
  }
}

TEST_CASE("exponent fit") {
  std::vector<std::pair<double, double>> exact, flat;
  for (double N : {64.0, 128.0, 256.0, 512.0, 1024.0}) {
    exact.emplace_back(N, std::pow(N, 2.0 / 3.0));
    flat.emplace_back(N, 0.7);
  }
  const auto f = exponent_fit(exact);
  CHECK(std::abs(f.slope - 2.0 / 3.0) < 1e-12);
  CHECK(std::abs(f.intercept) < 1e-11);
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK(exponent_fit(flat).slope == doctest::Approx(0.0));

  // log v = 0.3 + 0.5 log N + eps, eps ~ N(0, 0.05^2): the slope is off by
  // at most 3 analytic standard errors and the reported SE is near it.
  RngStream rng(23, 0);
  std::vector<double> logs;
  for (int k = 0; k < 12; ++k) logs.push_back(std::log(16.0) + 0.35 * k);
  double mx = 0, sxx = 0;
  for (double x : logs) mx += x / logs.size();
  for (double x : logs) sxx += (x - mx) * (x - mx);
  const double analytic_se = 0.05 / std::sqrt(sxx);
  int within = 0;
  double se_ratio = 0;
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<std::pair<double, double>> noisy;
    for (double x : logs) noisy.emplace_back(std::exp(x), std::exp(0.3 + 0.5 * x + 0.05 * rng.normal()));
    const auto g = exponent_fit(noisy);
    within += std::abs(g.slope - 0.5) < 3 * analytic_se;
    se_ratio += g.slope_se / analytic_se / 200;
  }
  CHECK(within >= 197);
  CHECK(se_ratio == doctest::Approx(1.0).epsilon(0.1));

  CHECK_THROWS_AS(exponent_fit({{1, 1}, {2, 2}}), std::domain_error);
  CHECK_THROWS_AS(exponent_fit({{4, 1}, {4, 2}, {4, 3}}), std::domain_error);
  CHECK_THROWS_AS(exponent_fit({{1, 1}, {2, 0}, {3, 3}}), std::domain_error);
}

TEST_CASE("StatReport") {
  auto r = make_report("x", 0.01, 0.02, 10);
  CHECK(r.pass);
  CHECK_FALSE(make_report("x", 0.03, 0.02, 10).pass);
  CHECK(make_report("y", 5, 3, 1, Direction::AtLeast).pass);
  r.metadata["N"] = 4;
  const auto line = to_json_line(r);
  CHECK(line.find('\n') == std::string::npos);
  CHECK(line.find("\"pass\":true") != std::string::npos);
  CHECK(line.find("\"N\":4") != std::string::npos);
}

TEST_CASE("parallel_for covers every index once and rethrows") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 7) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("monotone_check") {
  CHECK(monotone_check(2.0, 8, 200, 1, PairMode::Equal).statistic == 0.0);
  CHECK(monotone_check(2.0, 8, 300, 2, PairMode::Shift).pass);
  const auto a = monotone_check(1.5, 8, 300, 3, PairMode::Random);
  CHECK(a.pass);
  const auto c = monotone_check(1.5, 8, 300, 3, PairMode::Random, true);
  CHECK_FALSE(c.pass);
  CHECK(c.statistic > 20);
  CHECK(monotone_check(1.5, 8, 300, 3, PairMode::Random, true, 3).statistic == c.statistic);
  CHECK_THROWS_AS(monotone_check(2.0, 12, 10, 1), std::domain_error);
}

TEST_CASE("gibbs_invariance_check") {
  SUBCASE("degenerate window") {
    const auto r = gibbs_invariance_check(3, 2.0, 4, 5, 50, 9);
    CHECK(r.statistic == 0.0);
    CHECK(r.pass);
  }
  SUBCASE("deterministic in the job count") {
    const auto a = gibbs_invariance_check(3, 2.0, 3, 6, 300, 10, 30.0, false, 0.1, 1);
    const auto b = gibbs_invariance_check(3, 2.0, 3, 6, 300, 10, 30.0, false, 0.1, 3);
    CHECK(a.statistic == b.statistic);
    CHECK(a.pass);
  }
  CHECK_THROWS_AS(gibbs_invariance_check(4, 2.0, 1, 5, 10, 1), std::domain_error);
}

TEST_CASE("polymer scans") {
  const auto rows = simulate_polymer_rows(2.0, 1.0, 32, 200, 5, 1.0, 2);
  CHECK(rows.n == 32);
  CHECK(rows.rows[0].size() > 32u);
  const auto again = simulate_polymer_rows(2.0, 1.0, 32, 200, 5, 1.0, 1);
  const auto bare = simulate_polymer_rows(2.0, 1.0, 32, 200, 5, 0.0, 1);
  CHECK(bare.rows[0].size() == 32u);
  for (std::size_t i = 0; i < 200; ++i) CHECK(rows.log_z(i) == again.log_z(i));

  const auto s = tw_scan_row(rows);
  CHECK(s.N == 32);
  CHECK(s.replicas == 200);
  CHECK(s.ks < 0.3);
  CHECK(s.mean < 0.0);

  const double w1 = median_modulus(rows, 1.0, 0.1, 200);
  const double w4 = median_modulus(rows, 1.0, 0.4, 200);
  CHECK(w1 > 0.0);
  CHECK(w4 >= w1);
  CHECK_THROWS_AS(median_modulus(bare, 1.0, 0.1, 10), WindowError);

  std::vector<ScanRow> seq(4);
  seq[0].ks = 0.3;
  seq[1].ks = 0.2;
  seq[2].ks = 0.25;
  seq[3].ks = 0.1;
  CHECK(ks_inversions(seq) == 1);
  CHECK_THROWS_AS(tw_convergence_scan(2.0, 1.0, {64, 32}, 10, 1), std::domain_error);
}
