#pragma once

#include "nlsv/core/parallel.hpp"
#include "nlsv/spectral/resolvent.hpp"

namespace nlsv {

struct KatoOptions {
  double tau_min = 1e-4;
  double tau_max = 1e4;
  int panels = 48;  // Gauss panels in ln τ
  int order = 8;
};

/// c(s) from its normalization 1/c(s) = ∫_0^∞ τ^{s/2-1} (τ+1)^{-1} dτ, by
/// Gauss quadrature in u = ln τ with the exponential tails added in closed form.
inline double kato_constant(double s) {
  require(s > 0.0 && s < 2.0, "Kato constant needs 0 < s < 2");
  const double a = 0.5 * s;
  const double span = 60.0 / std::min(a, 1.0 - a);
  double integral = 0.0;
  for (const auto& [u, w] : composite_gauss(-span, span, 400, 10))
    integral += w * (u < 0.0 ? std::exp(a * u) / (std::exp(u) + 1.0) : std::exp((a - 1.0) * u) / (1.0 + std::exp(-u)));
  // tails: e^{au}/(e^u+1) ≈ e^{au} below, e^{(a-1)u} above
  integral += std::exp(-a * span) / a + std::exp((a - 1.0) * span) / (1.0 - a);
  return 1.0 / integral;
}

/// (-Δ_V)^{s/2} f = c(s) ∫_0^∞ τ^{s/2-1} (f - τ(τ-Δ_V)^{-1} f) dτ on the
/// Dirichlet box, with the integral cut at [τ_min, τ_max] and both tails
/// estimated from the leading small/large τ behaviour.
inline CVec kato_fractional(const Potential& v, double s, const CVec& f, const KatoOptions& opt = {}) {
  require(s > 0.0 && s < 2.0, "Kato route needs 0 < s < 2");
  const double a = 0.5 * s;
  const auto nodes = composite_gauss(std::log(opt.tau_min), std::log(opt.tau_max), opt.panels, opt.order);
  std::vector<CVec> parts(nodes.size());
  parallel_for(static_cast<int>(nodes.size()), [&](int q) {
    const double tau = std::exp(nodes[q][0]);
    const CVec rf = resolvent_apply(v, tau, f);
    parts[q] = (f - tau * rf) * (nodes[q][1] * std::pow(tau, a));  // dτ = τ du
  });
  CVec acc = CVec::Zero(f.size());
  for (const CVec& p : parts) acc += p;
  const double lo = opt.tau_min, hi = opt.tau_max;
  acc += std::pow(lo, a) / a * f - std::pow(lo, a + 1.0) / (a + 1.0) * resolvent_apply(v, lo, f);
  const CVec hf = apply_hamiltonian(v, f);
  acc += std::pow(hi, a - 1.0) / (1.0 - a) * hf - std::pow(hi, a - 2.0) / (2.0 - a) * apply_hamiltonian(v, hf);
  return acc * kato_constant(s);
}

/// A(s) f = c(s) ∫_0^∞ τ^{s/2} R(τ) V_1 R(τ) f dτ, R(τ) = (τ - Δ_V)^{-1},
/// V_1 = 2V + xV'.
inline CVec kato_A(const Potential& v, double s, const CVec& f, const KatoOptions& opt = {}) {
  require(s > 0.0 && s < 2.0, "A(s) needs 0 < s < 2");
  const double a = 0.5 * s;
  const CVec v1 = virial_potential(v).cast<cplx>();
  auto sandwich = [&](double tau) {
    const Resolvent r(v, tau);
    return r.solve(CVec(v1.cwiseProduct(r.solve(f))));
  };
  const auto nodes = composite_gauss(std::log(opt.tau_min), std::log(opt.tau_max), opt.panels, opt.order);
  std::vector<CVec> parts(nodes.size());
  parallel_for(static_cast<int>(nodes.size()), [&](int q) {
    const double tau = std::exp(nodes[q][0]);
    parts[q] = sandwich(tau) * (nodes[q][1] * std::pow(tau, a + 1.0));
  });
  CVec acc = CVec::Zero(f.size());
  for (const CVec& p : parts) acc += p;
  const double lo = opt.tau_min, hi = opt.tau_max;
  acc += std::pow(lo, a + 1.0) / (a + 1.0) * sandwich(lo);
  const CVec v1f = v1.cwiseProduct(f);
  const CVec mixed = apply_hamiltonian(v, v1f) + v1.cwiseProduct(apply_hamiltonian(v, f));
  acc += std::pow(hi, a - 1.0) / (1.0 - a) * v1f - std::pow(hi, a - 2.0) / (2.0 - a) * mixed;
  return acc * kato_constant(s);
}

}  // namespace nlsv
