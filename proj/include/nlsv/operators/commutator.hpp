#pragma once

#include "nlsv/core/field.hpp"
#include "nlsv/operators/gauge.hpp"
#include "nlsv/spectral/kato.hpp"

namespace nlsv {

enum class ARoute { kato, commutator };

/// x ∂_x P f with P = (-Δ_V)^{s/2}, differentiating the spectral
/// representation through ∂_x Ψ.
inline CVec x_derivative_of_power(const DistortedBasis& b, double s, const CVec& f) {
  require(b.has_derivative(), "commutator route needs a basis with x-derivatives");
  const SpatialGrid& g = b.grid();
  CVec spec = distorted_forward(b, f);
  for (int k = 0; k < g.size(); ++k) spec[k] *= std::pow(std::abs(b.tau(k)), s);
  CVec d = (b.dpsi.conjugate() * spec) * (g.dxi() / std::sqrt(2.0 * kPi));
  for (int i = 0; i < g.size(); ++i) d[i] *= g.x(i);
  return d;
}

/// A(s) f = s(-Δ_V)^{s/2} f + [x∂_x, (-Δ_V)^{s/2}] f, or its resolvent
/// integral c(s)∫τ^{s/2} R V_1 R f dτ.
inline CVec A_apply(const DistortedBasis& b, double s, const CVec& f, ARoute route, const KatoOptions& kato = {}) {
  require(s > 0.0 && s < 2.0, "A(s) needs 0 < s < 2");
  if (route == ARoute::kato) return kato_A(b.potential, s, f, kato);
  const SpatialGrid& g = b.grid();
  const CVec pf = fractional_power(b, s, f, Spectrum::potential);
  const CVec df = spectral_derivative(g, f);
  CVec xdf(g.size());
  for (int i = 0; i < g.size(); ++i) xdf[i] = g.x(i) * df[i];
  return s * pf + x_derivative_of_power(b, s, f) - fractional_power(b, s, xdf, Spectrum::potential);
}

/// ||A(s) f||_1 / ||f||_∞.
inline double A_bound_ratio(const DistortedBasis& b, double s, const CVec& f, ARoute route) {
  return weighted_norm(b.grid(), A_apply(b, s, f, route), 1, 0.0) / sup_norm(f);
}

struct NonlinearTerm {
  double lambda = 0.0;
  double p = 3.0;
};

/// λ|u|^{p-1} u, zero where u vanishes.
inline CVec power_nonlinearity(const CVec& u, const NonlinearTerm& nl) {
  CVec out(u.size());
  for (int i = 0; i < u.size(); ++i) {
    const double a = std::abs(u[i]);
    out[i] = a == 0.0 ? cplx(0.0) : nl.lambda * std::pow(a, nl.p - 1.0) * u[i];
  }
  return out;
}

struct ResidualSample {
  double t = 0.0;
  double residual = 0.0;  // ||r(t)||_2
  double norm = 0.0;      // || |J_V(t)|^s u(t) ||_2
};

class TrajectoryError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// r = (i∂_t + Δ_V)|J_V|^s u - i t^{s-1} M(t) A(s) M(-t) u + λ|J_V|^s(|u|^{p-1}u)
/// at every interior sample of a uniformly spaced trajectory, ∂_t by the
/// five-point central difference.
inline std::vector<ResidualSample> commutator_residual(const DistortedBasis& b, double s, const Trajectory& traj,
                                                       std::optional<NonlinearTerm> nl = std::nullopt,
                                                       ARoute route = ARoute::commutator) {
  const int m = static_cast<int>(traj.size());
  if (m < 5) throw TrajectoryError("time differencing needs at least five samples");
  const double dt = traj[1].t - traj[0].t;
  for (int n = 1; n < m; ++n)
    if (std::abs(traj[n].t - traj[n - 1].t - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
      throw TrajectoryError("trajectory samples must be uniformly spaced");
  const SpatialGrid& g = b.grid();
  std::vector<CVec> w(m);
  parallel_for(m, [&](int n) { w[n] = weighted_J_power(b, s, traj[n].t, traj[n].values, Spectrum::potential); });
  std::vector<ResidualSample> out(m - 4);
  parallel_for(m - 4, [&](int q) {
    const int n = q + 2;
    const double t = traj[n].t;
    const CVec dwdt = (w[n - 2] - 8.0 * w[n - 1] + 8.0 * w[n + 1] - w[n + 2]) / (12.0 * dt);
    const CVec lap = -apply_multiplier(b, [](double lam) { return lam; }, w[n], Spectrum::potential);
    const CVec a = A_apply(b, s, gauge(g, t, GaugeSign::minus, traj[n].values), route);
    CVec r = I * dwdt + lap - I * std::pow(t, s - 1.0) * gauge(g, t, GaugeSign::plus, a);
    if (nl) r += weighted_J_power(b, s, t, power_nonlinearity(traj[n].values, *nl), Spectrum::potential);
    out[q] = {t, l2_norm(g, r), l2_norm(g, w[n])};
  });
  return out;
}

}  // namespace nlsv
