#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "nlsv/core/potential.hpp"

namespace nlsv {

/// Plane-wave-normalized Jost factors m_± sampled on the grid, with their x
/// derivatives; f_± = e^{±iτx} m_±.
struct JostSolution {
  cplx tau;
  CVec m_plus, dm_plus;
  CVec m_minus, dm_minus;
  /// Largest node-wise change seen when the step was halved.
  double refinement_change = 0.0;
  double step = 0.0;
};

struct JostOptions {
  double max_step = 0.01;
  double tolerance = 1e-9;
  bool verify = true;
  int max_refinements = 3;
};

namespace detail {

using State = std::array<cplx, 2>;  // (f, f')

// Fourth-order Magnus step for f'' = (V - tau^2) f from x to x + h (h may be negative).
inline State magnus_step(const PotentialDescriptor& d, cplx k2, double x, double h, const State& y) {
  constexpr double c = 0.28867513459481288225;  // sqrt(3)/6
  const double v1 = evaluate(d, x + h * (0.5 - c));
  const double v2 = evaluate(d, x + h * (0.5 + c));
  const cplx alpha = (c / 2.0) * h * h * (v1 - v2);
  const cplx qbar = 0.5 * (v1 + v2) - k2;
  const cplx mu2 = alpha * alpha + h * h * qbar;
  const cplx mu = std::sqrt(mu2);
  cplx ch, shc;  // cosh(mu), sinh(mu)/mu
  if (std::abs(mu) < 1e-4) {
    ch = 1.0 + mu2 / 2.0 + mu2 * mu2 / 24.0;
    shc = 1.0 + mu2 / 6.0 + mu2 * mu2 / 120.0;
  } else {
    ch = std::cosh(mu);
    shc = std::sinh(mu) / mu;
  }
  return {(ch + shc * alpha) * y[0] + shc * h * y[1], shc * h * qbar * y[0] + (ch - shc * alpha) * y[1]};
}

// Integrates from x0 to x1, never stepping across a breakpoint.
inline State propagate(const PotentialDescriptor& d, cplx tau, double x0, double x1, State y, double max_step,
                       const std::vector<double>& cuts) {
  if (x0 == x1) return y;
  std::vector<double> pts{x0};
  for (double b : cuts)
    if ((b - x0) * (b - x1) < 0.0) pts.push_back(b);
  pts.push_back(x1);
  if (x1 < x0) std::sort(pts.begin() + 1, pts.end() - 1, std::greater<>());
  else std::sort(pts.begin() + 1, pts.end() - 1);
  const cplx k2 = tau * tau;
  for (std::size_t p = 0; p + 1 < pts.size(); ++p) {
    const double len = pts[p + 1] - pts[p];
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(len) / max_step)));
    const double h = len / n;
    for (int s = 0; s < n; ++s) y = magnus_step(d, k2, pts[p] + s * h, h, y);
  }
  return y;
}

// Free continuation of (f, f') from x0 to x.
inline State free_continue(cplx tau, double x0, double x, const State& y) {
  const double dx = x - x0;
  const cplx arg = tau * dx;
  const cplx cs = std::cos(arg);
  const cplx sn_over = std::abs(tau) < 1e-300 ? cplx(dx) : std::sin(arg) / tau;
  return {y[0] * cs + y[1] * sn_over, -y[0] * tau * tau * sn_over + y[1] * cs};
}

inline void store(CVec& m, CVec& dm, int i, double x, cplx tau, int sign, const State& y) {
  // m = e^{-sign i tau x} f, m' = e^{-sign i tau x}(f' - sign i tau f)
  const cplx ph = std::exp(-static_cast<double>(sign) * I * tau * x);
  m[i] = ph * y[0];
  dm[i] = ph * (y[1] - static_cast<double>(sign) * I * tau * y[0]);
}

inline JostSolution solve_once(const Potential& v, cplx tau, double max_step) {
  const SpatialGrid& g = v.grid;
  const int n = g.size();
  const auto cuts = breakpoints(v.descriptor);
  const double r = v.support;
  int hi = n - 1, lo = 0;
  while (hi > 0 && g.x(hi - 1) >= r) --hi;
  while (lo < n - 1 && g.x(lo + 1) <= -r) ++lo;
  if (lo > hi) lo = hi = std::clamp(static_cast<int>(std::lround(g.half_width() / g.dx())), 0, n - 1);

  JostSolution sol{tau, CVec(n), CVec(n), CVec(n), CVec(n), 0.0, max_step};

  // m_+: free to the right of `hi`, integrated leftwards, free again left of `lo`.
  {
    const double xh = g.x(hi);
    State y{std::exp(I * tau * xh), I * tau * std::exp(I * tau * xh)};
    for (int i = hi; i < n; ++i) {
      sol.m_plus[i] = 1.0;
      sol.dm_plus[i] = 0.0;
    }
    for (int i = hi - 1; i >= lo; --i) {
      y = propagate(v.descriptor, tau, g.x(i + 1), g.x(i), y, max_step, cuts);
      store(sol.m_plus, sol.dm_plus, i, g.x(i), tau, +1, y);
    }
    for (int i = lo - 1; i >= 0; --i)
      store(sol.m_plus, sol.dm_plus, i, g.x(i), tau, +1, free_continue(tau, g.x(lo), g.x(i), y));
  }
  // m_-: mirror image.
  {
    const double xl = g.x(lo);
    State y{std::exp(-I * tau * xl), -I * tau * std::exp(-I * tau * xl)};
    for (int i = 0; i <= lo; ++i) {
      sol.m_minus[i] = 1.0;
      sol.dm_minus[i] = 0.0;
    }
    for (int i = lo + 1; i <= hi; ++i) {
      y = propagate(v.descriptor, tau, g.x(i - 1), g.x(i), y, max_step, cuts);
      store(sol.m_minus, sol.dm_minus, i, g.x(i), tau, -1, y);
    }
    for (int i = hi + 1; i < n; ++i)
      store(sol.m_minus, sol.dm_minus, i, g.x(i), tau, -1, free_continue(tau, g.x(hi), g.x(i), y));
  }
  return sol;
}

}  // namespace detail

/// Jost factors at real momentum or at i*sigma with sigma > 0. With
/// `verify`, the step is halved until consecutive solutions agree.
inline JostSolution solve_jost(const Potential& v, cplx tau, const JostOptions& opt = {}) {
  require(std::isfinite(tau.real()) && std::isfinite(tau.imag()), "momentum must be finite");
  require(tau.imag() == 0.0 || (tau.real() == 0.0 && tau.imag() > 0.0),
          "momentum must be real or on the positive imaginary axis");
  double step = std::min(opt.max_step, v.grid.dx());
  JostSolution sol = detail::solve_once(v, tau, step);
  if (!opt.verify || v.zero()) return sol;
  for (int attempt = 0; attempt <= opt.max_refinements; ++attempt) {
    step *= 0.5;
    JostSolution fine = detail::solve_once(v, tau, step);
    const double scale = std::max(1.0, sol.m_plus.cwiseAbs().maxCoeff());
    const double change = std::max((fine.m_plus - sol.m_plus).cwiseAbs().maxCoeff(),
                                   (fine.m_minus - sol.m_minus).cwiseAbs().maxCoeff()) /
                          scale;
    fine.refinement_change = change;
    if (change < opt.tolerance) return fine;
    sol = std::move(fine);
  }
  throw NumericalError("Jost integration did not settle: change " + std::to_string(sol.refinement_change) +
                       " at tau = " + std::to_string(tau.real()) + "+" + std::to_string(tau.imag()) + "i");
}

/// w = f_+' f_- - f_+ f_-' evaluated at node i (x independent for exact solutions).
inline cplx wronskian_at(const JostSolution& s, int i) {
  return 2.0 * I * s.tau * s.m_plus[i] * s.m_minus[i] + s.dm_plus[i] * s.m_minus[i] - s.m_plus[i] * s.dm_minus[i];
}

inline int center_index(const SpatialGrid& g) { return g.size() / 2; }

inline cplx wronskian(const JostSolution& s, const SpatialGrid& g) { return wronskian_at(s, center_index(g)); }

/// max over interior nodes of |m'' ± 2iτ m' - V m|, with m'' from a five-point
/// stencil and m' as integrated.
inline double jost_residual(const Potential& v, const JostSolution& s) {
  const SpatialGrid& g = v.grid;
  const double h2 = g.dx() * g.dx();
  double worst = 0.0;
  for (int i = 2; i + 2 < g.size(); ++i) {
    auto d2 = [&](const CVec& m) {
      return (-m[i - 2] + 16.0 * m[i - 1] - 30.0 * m[i] + 16.0 * m[i + 1] - m[i + 2]) / (12.0 * h2);
    };
    const double vi = v.samples[i];
    worst = std::max(worst, std::abs(d2(s.m_plus) + 2.0 * I * s.tau * s.dm_plus[i] - vi * s.m_plus[i]));
    worst = std::max(worst, std::abs(d2(s.m_minus) - 2.0 * I * s.tau * s.dm_minus[i] - vi * s.m_minus[i]));
  }
  return worst;
}

/// Central difference of m_± in τ.
inline std::pair<CVec, CVec> jost_tau_derivative(const Potential& v, double tau, double h = 1e-4,
                                                 const JostOptions& opt = {}) {
  const JostSolution a = solve_jost(v, tau + h, opt);
  const JostSolution b = solve_jost(v, tau - h, opt);
  return {(a.m_plus - b.m_plus) / (2.0 * h), (a.m_minus - b.m_minus) / (2.0 * h)};
}

}  // namespace nlsv
