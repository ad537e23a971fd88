#include <cmath>
#include <vector>

#include "doctest.h"
#include "lgle/errors.hpp"
#include "lgle/polymer.hpp"
#include "lgle/rsk.hpp"
#include "lgle/samplers.hpp"
#include "oracles.hpp"

using namespace lgle;
using namespace lgle::rsk;

TEST_CASE("L kernel worked examples") {
  const auto a = step_l_kernel({1, 1}, {1, 1, 1}, {1, 1}, 1.0);
  CHECK(a[0] == doctest::Approx(2.0));
  CHECK(a[1] == doctest::Approx(1.0));
  CHECK(a[2] == doctest::Approx(0.5));
  const double x = 0.7, y1 = 1.3, y2 = 0.4, xt = 2.2, d = 0.9;
  const auto b = step_l_kernel({x}, {y1, y2}, {xt}, d);
  CHECK(b[0] == doctest::Approx(d * (y1 + xt)).epsilon(1e-14));
  CHECK(b[1] == doctest::Approx(y2 * y1 * xt / (x * (y1 + xt))).epsilon(1e-14));
  CHECK(step_l_kernel({x}, {y1, y2}, {xt}, d) == b);
  CHECK_THROWS_AS(step_l_kernel({-1}, {1, 1}, {1}, 1), std::domain_error);
  CHECK_THROWS_AS(step_l_kernel({1, 1}, {1, 1}, {1}, 1), std::domain_error);
}

TEST_CASE("K-bar initial draw") {
  RngStream rng(1, 0);
  const auto z1 = sample_kbar_init({2.5}, 1.0, rng);
  CHECK(z1.N() == 1);
  CHECK(z1.z(1, 1) == doctest::Approx(2.5));

  std::vector<double> s(100000);
  for (auto& v : s) v = sample_kbar_init({1.0, 1.0}, 1.0, rng).z(1, 1);
  oracle::TabulatedCdf F([](double z) { return z <= 0 ? 0.0 : std::exp(-z - 1 / z) / z; }, 0.0,
                         60.0);
  CHECK(oracle::ks_one_sample(s, F) < 0.01);

  // siblings in row 2 are conditionally independent given row 3
  std::vector<double> a, b;
  for (int i = 0; i < 100000; ++i) {
    const auto z = sample_kbar_init({0.5, 1.0, 3.0}, 1.0, rng);
    CHECK(z.row(3) == std::vector<double>{std::log(0.5), 0.0, std::log(3.0)});
    a.push_back(z.log_z(2, 1));
    b.push_back(z.log_z(2, 2));
  }
  const double ma = oracle::mean(a), mb = oracle::mean(b);
  double c = 0;
  for (std::size_t i = 0; i < a.size(); ++i) c += (a[i] - ma) * (b[i] - mb);
  c /= a.size() * std::sqrt(oracle::variance(a) * oracle::variance(b));
  CHECK(std::abs(c) < 0.02);
  CHECK_THROWS_AS(sample_kbar_init({1.0, 0.0}, 1.0, rng), std::domain_error);
}

TEST_CASE("P1 step multiplies by an inverse-gamma weight") {
  RngStream rng(2, 0);
  std::vector<double> r(100000);
  ZTriangle z(1);
  z.row(1)[0] = std::log(3.0);
  for (auto& v : r) v = step_pi(z, 2.0, rng).log_z(1, 1) - std::log(3.0);
  oracle::TabulatedCdf F([](double u) { return std::exp(-2 * u - std::exp(-u)); }, -6.0, 40.0,
                         1 << 16);
  CHECK(oracle::ks_one_sample(r, F) < 0.01);
}

TEST_CASE("chain driven by a fixed disorder reproduces the tau ratios") {
  // Feeding d_{n,k} to level k at step n turns the chain into geometric RSK
  // of the disorder; from the centred large-M start it must match the
  // brute-force triangle.
  RngStream rng(3, 0);
  for (int rep = 0; rep < 5; ++rep) {
    const int N = 4, n_max = 6;
    const auto d = polymer::sample_disorder(n_max, N, 1.5, rng);
    ZTriangle z = sample_kbar_init_log(initial_log_y(N, 200.0), rng);
    for (int n = 1; n <= n_max; ++n) {
      std::vector<double> ld;
      for (int k = 1; k <= N; ++k) ld.push_back(d(n, k));
      z = step_pi_with(z, ld);
      z.validate();
      const auto bf = polymer::compute_z_triangle(d, n);
      for (int k = 1; k <= N; ++k)
        for (int l = 1; l <= std::min(k, n); ++l) CHECK(std::abs(z.log_z(k, l) - bf.log_z(k, l)) < 1e-8);
    }
  }
}

TEST_CASE("run_chain bookkeeping and extraction") {
  RngStream rng(4, 0);
  const auto tr = run_chain(4, 2.0, 30.0, 10, rng);
  CHECK(tr.states.size() == 11);
  CHECK(tr.variates_drawn == 40);
  const auto ly = initial_log_y(4, 30.0);
  CHECK(tr.states[0].row(4) == ly);
  CHECK(ly[0] == doctest::Approx(-45.0 + 22.5));
  for (const auto& s : tr.states) s.validate();
  const auto le = extract_top_curves(tr, 2, 2, 10);
  CHECK(le.index_lo == 2);
  CHECK(le.num_curves() == 2);
  for (int j = 2; j <= 10; ++j) {
    CHECK(le.at(1, j) == tr.states[j].log_z(4, 1));
    CHECK(le.at(2, j) == tr.states[j].log_z(4, 2));
  }
  CHECK(le.eval(1, 2.5) == doctest::Approx(0.5 * (le.at(1, 2) + le.at(1, 3))));
  CHECK_THROWS_AS(extract_top_curves(tr, 2, 1, 10), WindowError);
  CHECK_THROWS_AS(extract_top_curves(tr, 2, 2, 11), WindowError);
  CHECK_THROWS_AS(extract_top_curves(tr, 5, 5, 10), WindowError);
  const auto full = extract_top_curves(tr, 4, 4, 10);
  CHECK(full.num_curves() == 4);

  RngStream a(5, 5), b(5, 5);
  CHECK(run_chain(3, 1.0, 30.0, 4, a).states.back().log_rows ==
        run_chain(3, 1.0, 30.0, 4, b).states.back().log_rows);
}

TEST_CASE("chain top entry has the polymer law") {
  const int R = 50000;
  std::vector<double> chain, dp;
  for (int r = 0; r < R; ++r) {
    RngStream g(6, static_cast<std::uint64_t>(r));
    chain.push_back(run_chain_top_row(4, 2.0, 30.0, 8, g).back()[0]);
    RngStream h(7, static_cast<std::uint64_t>(r));
    dp.push_back(polymer::simulate_log_partition_row(8, 4, 2.0, h).back());
  }
  CHECK(oracle::ks_two_sample(chain, dp) < 0.02);
}
