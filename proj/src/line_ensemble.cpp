#include "lgle/line_ensemble.hpp"

#include <cmath>
#include <stdexcept>

#include "lgle/errors.hpp"

namespace lgle {

double LineEnsemble::eval(int i, double x) const {
  if (i < 1 || i > num_curves()) throw std::out_of_range("LineEnsemble: no such curve");
  if (x < index_lo || x > index_hi) throw WindowError("LineEnsemble: point outside the window");
  const int j = static_cast<int>(std::floor(x));
  if (j == index_hi) return at(i, j);
  const double t = x - j;
  return (1.0 - t) * at(i, j) + t * at(i, j + 1);
}

void LineEnsemble::validate() const {
  if (index_hi < index_lo) throw std::domain_error("LineEnsemble: empty window");
  for (const auto& c : curves) {
    if (static_cast<int>(c.size()) != index_hi - index_lo + 1) {
      throw std::domain_error("LineEnsemble: curve length does not match the window");
    }
    for (double v : c) {
      if (!std::isfinite(v)) throw std::domain_error("LineEnsemble: values must be finite");
    }
  }
}

}  // namespace lgle
