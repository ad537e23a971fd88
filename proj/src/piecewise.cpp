#include "lgle/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lgle/errors.hpp"

namespace lgle {

PiecewiseLinear::PiecewiseLinear(std::vector<double> xs, std::vector<double> ys,
                                 bool constant_extension)
    : xs_(std::move(xs)), ys_(std::move(ys)), extend_(constant_extension) {
  if (xs_.empty() || xs_.size() != ys_.size()) {
    throw std::domain_error("PiecewiseLinear: need matching nonempty knots");
  }
  for (std::size_t i = 1; i < xs_.size(); ++i) {
    if (!(xs_[i] > xs_[i - 1])) throw std::domain_error("PiecewiseLinear: knots must increase");
  }
}

double PiecewiseLinear::operator()(double x) const {
  if (x <= xs_.front() || x >= xs_.back()) {
    if (x == xs_.front()) return ys_.front();
    if (x == xs_.back()) return ys_.back();
    if (!extend_) throw WindowError("PiecewiseLinear: argument outside the domain");
    return x < xs_.front() ? ys_.front() : ys_.back();
  }
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
  const double t = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
  return ys_[i] + t * (ys_[i + 1] - ys_[i]);
}

}  // namespace lgle
