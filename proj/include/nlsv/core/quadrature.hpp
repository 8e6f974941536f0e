#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "nlsv/core/fourier.hpp"

namespace nlsv {

/// Trapezoid on the periodic lattice; spectrally accurate for integrands
/// that vanish towards the box edge.
inline double integrate(const SpatialGrid& g, const RVec& f) { return f.sum() * g.dx(); }
inline cplx integrate(const SpatialGrid& g, const CVec& f) { return f.sum() * g.dx(); }

inline double l2_norm(const SpatialGrid& g, const CVec& f) { return std::sqrt(f.squaredNorm() * g.dx()); }
inline double sup_norm(const CVec& f) { return f.size() ? f.cwiseAbs().maxCoeff() : 0.0; }
inline double spectral_l2_norm(const SpatialGrid& g, const CVec& spec) {
  return std::sqrt(spec.squaredNorm() * g.dxi());
}
inline cplx inner(const SpatialGrid& g, const CVec& f, const CVec& h) { return f.dot(h) * g.dx(); }

/// ||<x>^s f||_{L^p} for p in {1, 2, inf}; p = 0 encodes infinity.
inline double weighted_norm(const SpatialGrid& g, const CVec& f, int p, double s) {
  require(s >= 0.0, "weight order must be nonnegative");
  require(p == 1 || p == 2 || p == 0, "supported exponents are 1, 2 and infinity (0)");
  double acc = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const double w = std::pow(japanese(g.x(i)), s) * std::abs(f[i]);
    if (p == 1) acc += w;
    else if (p == 2) acc += w * w;
    else acc = std::max(acc, w);
  }
  if (p == 1) return acc * g.dx();
  if (p == 2) return std::sqrt(acc * g.dx());
  return acc;
}

inline constexpr int kInfinity = 0;

/// (||f||_{H^s}^2 + || |x|^s f ||_2^2)^{1/2}.
inline double sigma_norm(const SpatialGrid& g, const CVec& f, double s) {
  require(s >= 0.0, "regularity must be nonnegative");
  const CVec spec = fourier_forward(g, f);
  double hs = 0.0;
  for (int k = 0; k < g.size(); ++k) hs += std::pow(1.0 + g.xi(k) * g.xi(k), s) * std::norm(spec[k]);
  hs *= g.dxi();
  double xs = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const double ax = std::abs(g.x(i));
    xs += (s == 0.0 ? 1.0 : std::pow(ax, 2.0 * s)) * std::norm(f[i]);
  }
  xs *= g.dx();
  return std::sqrt(hs + xs);
}

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
struct GaussLegendre {
  std::vector<double> nodes, weights;
  explicit GaussLegendre(int n) : nodes(n), weights(n) {
    for (int i = 0; i < n; ++i) {
      double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= n; ++k) {
          const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = pk;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      nodes[i] = z;
      weights[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }
};

/// Composite Gauss-Legendre rule on [a, b] with `panels` equal panels.
inline std::vector<std::array<double, 2>> composite_gauss(double a, double b, int panels, int order) {
  const GaussLegendre gl(order);
  std::vector<std::array<double, 2>> out;
  out.reserve(static_cast<std::size_t>(panels) * order);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (int i = 0; i < order; ++i) out.push_back({mid + 0.5 * h * gl.nodes[i], 0.5 * h * gl.weights[i]});
  }
  return out;
}

}  // namespace nlsv
