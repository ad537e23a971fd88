#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace lgle {

/// Triangular array z_{k,l}, 1 <= l <= k <= N, stored as logs.
/// Row k may be shorter than k (the polymer route only defines
/// l <= min(k, n)).
struct ZTriangle {
  std::vector<std::vector<double>> log_rows;  // log_rows[k-1][l-1] = log z_{k,l}

  ZTriangle() = default;
  explicit ZTriangle(int N);

  int N() const { return static_cast<int>(log_rows.size()); }
  double log_z(int k, int l) const { return log_rows[k - 1][l - 1]; }
  double z(int k, int l) const { return std::exp(log_z(k, l)); }
  std::vector<double>& row(int k) { return log_rows[k - 1]; }
  const std::vector<double>& row(int k) const { return log_rows[k - 1]; }

  /// Throws std::domain_error unless every entry is finite (z strictly
  /// positive and finite).
  void validate() const;
};

}  // namespace lgle
