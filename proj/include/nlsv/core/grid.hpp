#pragma once

#include <cmath>

#include "nlsv/core/types.hpp"

namespace nlsv {

/// Uniform truncation of the line to [-L, L) with N nodes and the matched
/// discrete-Fourier lattice xi_k = (k - N/2) * pi / L, k = 0..N-1.
class SpatialGrid {
 public:
  SpatialGrid(double half_width, int points) : L_(half_width), N_(points) {
    require(half_width > 0.0 && std::isfinite(half_width), "grid half width must be positive");
    require(points >= 16, "grid needs at least 16 points");
    require(points % 2 == 0, "grid point count must be even");
  }

  double half_width() const { return L_; }
  int size() const { return N_; }
  double dx() const { return 2.0 * L_ / N_; }
  double dxi() const { return kPi / L_; }
  double x(int i) const { return -L_ + i * dx(); }
  double xi(int k) const { return (k - N_ / 2) * dxi(); }
  double max_frequency() const { return kPi / dx(); }

  RVec nodes() const {
    RVec v(N_);
    for (int i = 0; i < N_; ++i) v[i] = x(i);
    return v;
  }
  RVec frequencies() const {
    RVec v(N_);
    for (int k = 0; k < N_; ++k) v[k] = xi(k);
    return v;
  }

  /// Same box, `factor` times as many points.
  SpatialGrid refined(int factor) const { return SpatialGrid(L_, N_ * factor); }

  bool operator==(const SpatialGrid& o) const { return L_ == o.L_ && N_ == o.N_; }

 private:
  double L_;
  int N_;
};

inline SpatialGrid make_grid(double half_width, int points) { return SpatialGrid(half_width, points); }

}  // namespace nlsv
