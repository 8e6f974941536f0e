#pragma once

#include "nlsv/spectral/basis.hpp"

namespace nlsv {

enum class GaugeSign { plus, minus };

/// M(±t) f = e^{±ix²/4t} f.
inline CVec gauge(const SpatialGrid& g, double t, GaugeSign sign, const CVec& f) {
  require(t > 0.0, "gauge needs t > 0");
  require(f.size() == g.size(), "field does not match grid");
  const double sgn = sign == GaugeSign::plus ? 1.0 : -1.0;
  CVec out(g.size());
  for (int i = 0; i < g.size(); ++i) out[i] = std::exp(I * (sgn * g.x(i) * g.x(i) / (4.0 * t))) * f[i];
  return out;
}

/// e^{itΔ} f as the Fourier multiplier e^{-itξ²}.
inline CVec free_propagator(const SpatialGrid& g, double t, const CVec& f) {
  return apply_free_symbol(g, f, [t](double xi) { return std::exp(-I * (t * xi * xi)); });
}

/// e^{itΔ} f = M(t) D(t) F^{-1} M(t) f with D(t)ψ(x) = (2it)^{-1/2} ψ(x/2t);
/// F^{-1} is summed directly at the dilated points x_i / 2t.
inline CVec free_propagator_factored(const SpatialGrid& g, double t, const CVec& f) {
  require(t > 0.0, "propagator factorization needs t > 0");
  const int n = g.size();
  const CVec h = gauge(g, t, GaugeSign::plus, f);
  const cplx pre = 1.0 / std::sqrt(cplx(0.0, 2.0 * t)) * (g.dx() / std::sqrt(2.0 * kPi));
  CVec out(n);
  parallel_for(n, [&](int i) {
    const double y = g.x(i) / (2.0 * t);
    cplx acc = 0.0;
    for (int j = 0; j < n; ++j) acc += std::exp(-I * (y * g.x(j))) * h[j];
    out[i] = pre * acc;
  });
  return gauge(g, t, GaugeSign::plus, out);
}

/// J(t) f = 2ti f' + x f.
inline CVec vector_field_J(const SpatialGrid& g, double t, const CVec& f) {
  const CVec df = spectral_derivative(g, f);
  CVec out(g.size());
  for (int i = 0; i < g.size(); ++i) out[i] = 2.0 * t * I * df[i] + g.x(i) * f[i];
  return out;
}

/// Both sides of e^{itΔ} g(x) e^{-itΔ} f = M(t) g(2tp) M(-t) f, where p = i∂
/// carries the symbol ξ of the transform.
template <class G>
std::pair<CVec, CVec> conjugation_identity(const SpatialGrid& g, double t, G&& gfun, const CVec& f) {
  CVec back = free_propagator(g, -t, f);
  for (int i = 0; i < g.size(); ++i) back[i] *= gfun(g.x(i));
  const CVec lhs = free_propagator(g, t, back);
  const CVec inner_field = apply_free_symbol(g, gauge(g, t, GaugeSign::minus, f),
                                             [&](double xi) { return cplx(gfun(2.0 * t * xi)); });
  return {lhs, gauge(g, t, GaugeSign::plus, inner_field)};
}

/// |J(t)|^s f = M(t)(-t²Δ)^{s/2}M(-t) f, or the same with Δ_V.
inline CVec weighted_J_power(const DistortedBasis& b, double s, double t, const CVec& f, Spectrum which) {
  require(t > 0.0 && s >= 0.0, "weighted J power needs t > 0 and s >= 0");
  if (s == 0.0) return f;
  const SpatialGrid& g = b.grid();
  const CVec inner_field = fractional_power(b, s, gauge(g, t, GaugeSign::minus, f), which);
  return gauge(g, t, GaugeSign::plus, inner_field) * std::pow(t, s);
}

struct InvariantNormRecord {
  double s = 0.0, t = 0.0;
  double free = 0.0;       // || |J(t)|^s u ||
  double potential = 0.0;  // || |J_V(t)|^s u ||
};

inline InvariantNormRecord invariant_norms(const DistortedBasis& b, double s, double t, const CVec& f) {
  return {s, t, l2_norm(b.grid(), weighted_J_power(b, s, t, f, Spectrum::free)),
          l2_norm(b.grid(), weighted_J_power(b, s, t, f, Spectrum::potential))};
}

struct JComparison {
  double s = 0.0, t = 0.0, eps = 0.0;
  double free = 0.0, potential = 0.0, ratio = 1.0;
  /// For 1/2 < s < 1: ||J_V^s f|| / (t^{s+ε-1/2}(||J^{1/2-ε} f|| + ||J^s f||)).
  double forward_constant = 0.0;
  /// The same with the roles of J and J_V exchanged.
  double mirror_constant = 0.0;
};

inline JComparison j_vs_jv_report(const DistortedBasis& b, double s, double t, const CVec& f, double eps = 0.1) {
  require(t > 0.0, "comparison needs t > 0");
  JComparison r;
  r.s = s;
  r.t = t;
  r.eps = eps;
  const InvariantNormRecord top = invariant_norms(b, s, t, f);
  r.free = top.free;
  r.potential = top.potential;
  r.ratio = r.free > 0.0 ? r.potential / r.free : 1.0;
  if (s > 0.5 && s < 1.0) {
    const InvariantNormRecord low = invariant_norms(b, 0.5 - eps, t, f);
    const double scale = std::pow(t, s + eps - 0.5);
    r.forward_constant = top.potential / (scale * (low.free + top.free));
    r.mirror_constant = top.free / (scale * (low.potential + top.potential));
  }
  return r;
}

}  // namespace nlsv
