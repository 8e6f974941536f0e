#pragma once

#include <vector>

#include "nlsv/core/field.hpp"

namespace nlsv {

/// Deterministic family of localized Schwartz test functions: shifted and
/// modulated Gaussians times low-degree polynomials. Widths are kept above
/// the grid's resolution limit.
inline std::vector<CVec> schwartz_battery(const SpatialGrid& g, int count) {
  const double base = std::max(1.0, 8.0 / g.max_frequency());
  static constexpr double centers[] = {0.0, 1.5, -2.0, 3.0, -0.7, 0.4, -3.5, 2.2, -1.1, 4.0};
  static constexpr double widths[] = {1.0, 0.8, 1.5, 1.2, 2.0, 0.9, 1.3, 1.7, 1.1, 2.5};
  static constexpr double waves[] = {0.0, 1.0, -2.0, 0.5, 3.0, -1.5, 0.0, 2.5, -0.8, 1.2};
  std::vector<CVec> out;
  out.reserve(count);
  for (int n = 0; n < count; ++n) {
    const double c = centers[n % 10] + 0.37 * (n / 10);
    const double w = base * widths[(n * 3) % 10];
    const double k = waves[(n * 7) % 10];
    const int degree = n % 3;
    out.push_back(sample(g, [&](double x) {
      const double y = (x - c) / w;
      const double poly = degree == 0 ? 1.0 : degree == 1 ? y : y * y - 0.5;
      return cplx(poly * std::exp(-0.5 * y * y)) * std::exp(cplx(0.0, k * x));
    }));
  }
  return out;
}

}  // namespace nlsv
