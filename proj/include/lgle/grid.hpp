#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace lgle::numerics {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

/// Uniform grid on [lo, hi] carrying log-density values at its nodes.
struct Grid {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t n_points = 2;
  std::vector<double> log_values;

  Grid() = default;
  Grid(double lo, double hi, std::size_t n_points);

  double step() const { return (hi - lo) / static_cast<double>(n_points - 1); }
  double node(std::size_t i) const { return lo + static_cast<double>(i) * step(); }
  void validate() const;
};

/// Cumulative distribution of the piecewise-linear density that
/// interpolates exp(log_values) between nodes. Inversion solves the
/// quadratic in each cell exactly, so quantile() is monotone in u.
///
/// With end_corrected, cell masses carry the Euler-Maclaurin terms
/// (h^2/12 f', h^4/720 f''' from finite differences), so the CDF at nodes
/// is accurate to O(h^6) for smooth densities; inside a cell the
/// linear shape is rescaled to the corrected mass.
class PiecewiseLinearCdf {
 public:
  PiecewiseLinearCdf() = default;
  PiecewiseLinearCdf(double x0, double step, const std::vector<double>& log_values,
                     bool end_corrected = false);
  explicit PiecewiseLinearCdf(const Grid& g, bool end_corrected = false)
      : PiecewiseLinearCdf(g.lo, g.step(), g.log_values, end_corrected) {}

  double cdf(double x) const;
  double quantile(double u) const;
  /// log of the trapezoid integral of the density.
  double log_mass() const;
  double mean() const;
  double lo() const { return x0_; }
  double hi() const { return x0_ + step_ * static_cast<double>(p_.size() - 1); }
  std::size_t size() const { return p_.size(); }
  /// Mass of the first and last cells relative to the total.
  double edge_mass() const;

 private:
  double x0_ = 0.0;
  double step_ = 1.0;
  double log_scale_ = 0.0;
  std::vector<double> p_;    // density / exp(log_scale_)
  std::vector<double> cum_;    // cum_[i] = mass of [x0, x_i]
  std::vector<double> ratio_;  // cell mass / cell trapezoid
};

}  // namespace lgle::numerics
