#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lgle/piecewise.hpp"

namespace lgle::verify {

enum class Direction { AtMost, AtLeast };

struct StatReport {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  std::int64_t n_samples = 0;
  bool pass = false;
  Direction direction = Direction::AtMost;
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
};

StatReport make_report(std::string name, double statistic, double threshold, std::int64_t n,
                       Direction dir = Direction::AtMost);

/// One JSON object on a single line.
std::string to_json_line(const StatReport& r);

/// sup |F_n - F|. Throws std::domain_error on empty input.
double ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf);
/// sup |F_n - G_m|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// sup over |x - y| <= delta of |f(x) - f(y)| for piecewise-linear f,
/// exact: the maximum is attained at breakpoint pairs or at a breakpoint
/// paired with the point delta away.
double modulus_of_continuity(const PiecewiseLinear& f, double delta);

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_se = 0.0;
};

/// Least squares of log(value) on log(N).
ExponentFit exponent_fit(const std::vector<std::pair<double, double>>& pairs);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Each index is
/// handled exactly once; the first exception is rethrown.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

// ---------------------------------------------------------------------------
// Composite checks. Every replica draws from its own stream derived from
// (seed, check tag, replica index), so results do not depend on `jobs`.

enum class PairMode { Random, Shift, Equal };

/// Draws ordered boundary pairs at T in [3, T_max] (Random: independent
/// nonnegative raises of x, y and z; Shift: all raised by 1; Equal: the
/// same data twice), runs the grand coupling on both with shared uniforms
/// (or independent ones for the negative control) and counts componentwise
/// ordering violations. Passes iff there are none.
StatReport monotone_check(double theta, int T_max, int n_trials, std::uint64_t seed,
                          PairMode mode = PairMode::Random, bool independent_uniforms = false,
                          int jobs = 1);

/// For each replica: RSK chain (N, theta, M) up to step b, top two curves on
/// [2, b], L_1 at the window midpoint; then L_1 resampled on (a, b) given
/// L_1(a), L_1(b), L_2 and its value at the midpoint. Passes iff the
/// two-sample KS distance is below `threshold`. drop_interaction replaces
/// L_2 by -inf (negative control).
StatReport gibbs_invariance_check(int N, double theta, int a, int b, int n_replicas,
                                  std::uint64_t seed, double M = 30.0,
                                  bool drop_interaction = false, double threshold = 0.02,
                                  int jobs = 1);

/// H^RW bridge over times 0..T (sites 1..T+1) from 0 to pT with
/// p = -h'(r): KS of (l(T/2) - pT/2)/sqrt(T) against Normal(0, sigma_p^2/4).
StatReport bridge_midpoint_check(double theta, double r, int T, int draws, std::uint64_t seed,
                                 double threshold = 0.03, int jobs = 1);

/// Polymer replicas shared by the TW scan, the exponent fit and the
/// tightness proxy: row N of log Z^{n,N} for n = 1..n_cols.
struct PolymerRows {
  double theta = 0.0;
  double r = 0.0;
  int N = 0;
  int n = 0;  // floor(r N)
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> rows;
  double log_z(std::size_t replica) const { return rows[replica][static_cast<std::size_t>(n) - 1]; }
};

/// n_cols = floor(rN) + profile half-width for `profile_T` (0 for none) + 1.
/// Disorder is drawn row by row, so the column count changes every value:
/// runs that should share replicas must use the same profile_T.
PolymerRows simulate_polymer_rows(double theta, double r, int N, int n_replicas,
                                  std::uint64_t seed, double profile_T = 1.0, int jobs = 1);

struct ScanRow {
  int N = 0;
  double ks = 0.0;
  double mean = 0.0;
  double var = 0.0;
  int replicas = 0;
  std::uint64_t seed = 0;
};

/// KS of the rescaled free energy F(floor(rN), N) against F_GUE, with the
/// sample mean and variance of F.
ScanRow tw_scan_row(const PolymerRows& rows);

/// Uses simulate_polymer_rows with its default profile_T, so the replicas
/// coincide with those of the exponent scan and the tightness proxy.
std::vector<ScanRow> tw_convergence_scan(double theta, double r, const std::vector<int>& N_list,
                                         int n_replicas, std::uint64_t seed, int jobs = 1);

/// Number of strict increases in the KS sequence (noise inversions).
int ks_inversions(const std::vector<ScanRow>& rows);

/// Median over replicas of w(f_N^{LG}, delta) on [-T, T].
double median_modulus(const PolymerRows& rows, double T, double delta, std::size_t max_replicas);

}  // namespace lgle::verify
