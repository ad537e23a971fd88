#include "lgle/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lgle/errors.hpp"

namespace lgle::numerics {

Grid::Grid(double lo_, double hi_, std::size_t n)
    : lo(lo_), hi(hi_), n_points(n), log_values(n, kLogZero) {
  validate();
}

void Grid::validate() const {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::domain_error("Grid: need finite lo < hi");
  }
  if (n_points < 2) throw std::domain_error("Grid: need at least two nodes");
  if (!log_values.empty() && log_values.size() != n_points) {
    throw std::domain_error("Grid: log_values size mismatch");
  }
  for (double v : log_values) {
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
      throw std::domain_error("Grid: log values must be finite or -inf");
    }
  }
}

PiecewiseLinearCdf::PiecewiseLinearCdf(double x0, double step,
                                       const std::vector<double>& log_values, bool end_corrected)
    : x0_(x0), step_(step) {
  if (log_values.size() < 2 || !(step > 0.0)) {
    throw std::domain_error("PiecewiseLinearCdf: need >= 2 nodes and positive step");
  }
  log_scale_ = *std::max_element(log_values.begin(), log_values.end());
  if (!std::isfinite(log_scale_)) {
    throw DegenerateDistributionError("PiecewiseLinearCdf: density vanishes on the grid");
  }
  const std::size_t n = log_values.size();
  p_.resize(n);
  for (std::size_t i = 0; i < n; ++i) p_[i] = std::exp(log_values[i] - log_scale_);

  std::vector<double> cell(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) cell[i] = 0.5 * step_ * (p_[i] + p_[i + 1]);
  ratio_.assign(n - 1, 1.0);
  if (end_corrected && n >= 5) {
    const double h = step_;
    std::vector<double> d1(n, 0.0), d3(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (i >= 2 && i + 2 < n) {
        d1[i] = (-p_[i + 2] + 8.0 * p_[i + 1] - 8.0 * p_[i - 1] + p_[i - 2]) / (12.0 * h);
        d3[i] = (p_[i + 2] - 2.0 * p_[i + 1] + 2.0 * p_[i - 1] - p_[i - 2]) / (2.0 * h * h * h);
      } else if (i >= 1 && i + 1 < n) {
        d1[i] = (p_[i + 1] - p_[i - 1]) / (2.0 * h);
      } else if (i == 0) {
        d1[i] = (-3.0 * p_[0] + 4.0 * p_[1] - p_[2]) / (2.0 * h);
      } else {
        d1[i] = (3.0 * p_[i] - 4.0 * p_[i - 1] + p_[i - 2]) / (2.0 * h);
      }
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (cell[i] <= 0.0) continue;
      const double m = cell[i] - h * h / 12.0 * (d1[i + 1] - d1[i]) +
                       h * h * h * h / 720.0 * (d3[i + 1] - d3[i]);
      ratio_[i] = std::max(m, 0.0) / cell[i];
    }
  }
  cum_.assign(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) cum_[i] = cum_[i - 1] + ratio_[i - 1] * cell[i - 1];
}

double PiecewiseLinearCdf::log_mass() const { return log_scale_ + std::log(cum_.back()); }

double PiecewiseLinearCdf::cdf(double x) const {
  if (x <= x0_) return 0.0;
  const double total = cum_.back();
  const double pos = (x - x0_) / step_;
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= p_.size()) return 1.0;
  const double s = (pos - static_cast<double>(i)) * step_;
  const double slope = (p_[i + 1] - p_[i]) / step_;
  return (cum_[i] + ratio_[i] * (p_[i] * s + 0.5 * slope * s * s)) / total;
}

double PiecewiseLinearCdf::quantile(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("quantile: u must lie in [0, 1]");
  const double target = u * cum_.back();
  auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
  if (it == cum_.end()) return hi();
  std::size_t i = static_cast<std::size_t>(it - cum_.begin());
  i = i == 0 ? 0 : i - 1;
  // Solve p_i s + slope s^2 / 2 = r on [0, step].
  if (!(ratio_[i] > 0.0)) return x0_ + static_cast<double>(i) * step_;
  const double r = (target - cum_[i]) / ratio_[i];
  const double slope = (p_[i + 1] - p_[i]) / step_;
  const double disc = std::max(0.0, p_[i] * p_[i] + 2.0 * slope * r);
  const double denom = p_[i] + std::sqrt(disc);
  double s = denom > 0.0 ? 2.0 * r / denom : 0.0;
  s = std::clamp(s, 0.0, step_);
  return x0_ + static_cast<double>(i) * step_ + s;
}

double PiecewiseLinearCdf::mean() const {
  // Exact first moment of the piecewise-linear density.
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < p_.size(); ++i) {
    const double a = x0_ + static_cast<double>(i) * step_;
    m += ratio_[i] * step_ * (p_[i] * (a / 2 + step_ / 6) + p_[i + 1] * (a / 2 + step_ / 3));
  }
  return m / cum_.back();
}

double PiecewiseLinearCdf::edge_mass() const {
  const std::size_t n = cum_.size();
  return (cum_[1] + (cum_[n - 1] - cum_[n - 2])) / cum_.back();
}

}  // namespace lgle::numerics
