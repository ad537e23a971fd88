#include "lgle/ztriangle.hpp"

#include <stdexcept>

namespace lgle {

ZTriangle::ZTriangle(int N) : log_rows(static_cast<std::size_t>(N)) {
  for (int k = 1; k <= N; ++k) log_rows[k - 1].assign(static_cast<std::size_t>(k), 0.0);
}

void ZTriangle::validate() const {
  for (const auto& r : log_rows) {
    for (double v : r) {
      if (!std::isfinite(v)) throw std::domain_error("ZTriangle: entries must be positive and finite");
    }
  }
}

}  // namespace lgle
