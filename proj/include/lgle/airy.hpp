#pragma once

#include <utility>
#include <vector>

namespace lgle::numerics {

struct AiryValues {
  double ai;
  double aip;  // derivative
};

/// Ai and Ai'. Maclaurin series in long double for |x| <= 8, the
/// DLMF asymptotic expansions (optimally truncated) beyond.
AiryValues airy_ai(double x);

/// Gauss-Legendre nodes and weights on [a, b].
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Quadrature gauss_legendre(int n, double a = -1.0, double b = 1.0);

}  // namespace lgle::numerics
