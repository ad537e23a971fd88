#pragma once

#include <vector>

namespace lgle {

/// Piecewise-linear function through (xs[i], ys[i]) with strictly
/// increasing xs. Outside [xs.front(), xs.back()] it either extends by
/// constants or throws WindowError.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;
  PiecewiseLinear(std::vector<double> xs, std::vector<double> ys, bool constant_extension = false);

  double operator()(double x) const;
  double lo() const { return xs_.front(); }
  double hi() const { return xs_.back(); }
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  bool constant_extension() const { return extend_; }

 private:
  std::vector<double> xs_, ys_;
  bool extend_ = false;
};

}  // namespace lgle
