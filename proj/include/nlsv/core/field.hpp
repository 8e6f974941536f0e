#pragma once

#include <functional>
#include <vector>

#include "nlsv/core/grid.hpp"

namespace nlsv {

/// Complex samples u(x_i) at time t.
struct WaveField {
  CVec values;
  double t = 0.0;
};

using Trajectory = std::vector<WaveField>;

template <class Fn>
CVec sample(const SpatialGrid& g, Fn&& fn) {
  CVec v(g.size());
  for (int i = 0; i < g.size(); ++i) v[i] = cplx(fn(g.x(i)));
  return v;
}

inline bool all_finite(const CVec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) return false;
  return true;
}

}  // namespace nlsv
