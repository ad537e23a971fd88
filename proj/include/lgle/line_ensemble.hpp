#pragma once

#include <vector>

namespace lgle {

/// Curves L_1..L_K on the integer window [index_lo, index_hi].
struct LineEnsemble {
  int index_lo = 0;
  int index_hi = 0;
  std::vector<std::vector<double>> curves;  // curves[i-1][j - index_lo]

  int num_curves() const { return static_cast<int>(curves.size()); }
  double& at(int i, int j) { return curves[i - 1][j - index_lo]; }
  double at(int i, int j) const { return curves[i - 1][j - index_lo]; }
  /// Linear interpolation between integer sites.
  double eval(int i, double x) const;
  void validate() const;
};

}  // namespace lgle
