#pragma once

// Measurements behind the pass/fail checks. The CLI subcommands and the
// acceptance driver both call into here, so a check means the same thing in
// either place.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nlsv/core/io.hpp"
#include "nlsv/dynamics/decay.hpp"
#include "nlsv/spectral/battery.hpp"
#include "nlsv/spectral/littlewood_paley.hpp"

namespace nlsv::checks {

struct Measurement {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass = false;
  std::string detail;
};

inline Measurement below(std::string name, double value, double limit, std::string detail = {}) {
  return {std::move(name), value, limit, std::isfinite(value) && value < limit, std::move(detail)};
}

inline double relative_l2(const SpatialGrid& g, const CVec& a, const CVec& ref) {
  return l2_norm(g, CVec(a - ref)) / l2_norm(g, ref);
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

/// Transfer matrices across the two jumps of v0·1{|x|<a}: the right-moving
/// unit wave on the far right is continued leftward. Inside, the pair
/// (cos qx, sin qx / q) stays regular at q = 0.
inline cplx square_barrier_transmission(double v0, double a, double tau) {
  using M2 = Eigen::Matrix2cd;
  const cplx k(tau, 0.0);
  const cplx q = std::sqrt(cplx(tau * tau - v0, 0.0));
  auto outside = [k](double x) {
    M2 m;
    m << std::exp(I * k * x), std::exp(-I * k * x), I * k * std::exp(I * k * x), -I * k * std::exp(-I * k * x);
    return m;
  };
  auto inside = [q](double x) {
    const cplx sinc = std::abs(q) < 1e-12 ? cplx(x) : std::sin(q * x) / q;
    M2 m;
    m << std::cos(q * x), sinc, -q * q * sinc, std::cos(q * x);
    return m;
  };
  Eigen::Vector2cd c(1.0, 0.0);                         // e^{ikx} on the right
  c = inside(a).inverse() * (outside(a) * c);
  c = outside(-a).inverse() * (inside(-a) * c);         // A e^{ikx} + B e^{-ikx} on the left
  return 1.0 / c[0];
}

// ---------------------------------------------------------------- scattering

struct UnitarityResult {
  ScatteringData data;
  Measurement check;
};

inline UnitarityResult unitarity(const Potential& v, const std::vector<double>& taus, double limit = 1e-7) {
  ScatteringOptions opt;
  opt.unitarity_tolerance = std::numeric_limits<double>::infinity();  // measured here, not enforced
  UnitarityResult r{scattering_data(v, taus, opt), {}};
  r.check = below("unitarity[" + descriptor_name(v.descriptor) + "]", r.data.unitarity_defect(), limit);
  return r;
}

/// max |T - T_oracle| over τ ∈ [0.1, 10].
inline Measurement square_barrier_oracle(const SpatialGrid& g, potentials::SquareBarrier p, double limit = 1e-6) {
  const Potential v = sample_potential(p, g);
  std::vector<double> taus;
  for (double t = 0.1; t <= 10.0 + 1e-12; t += 0.05) taus.push_back(t);
  const UnitarityResult u = unitarity(v, taus, 1.0);
  double worst = 0.0;
  for (std::size_t k = 0; k < taus.size(); ++k)
    worst = std::max(worst, std::abs(u.data.T[k] - square_barrier_transmission(p.v0, p.a, taus[k])));
  return below("square_barrier_transfer_matrix", worst, limit);
}

// ------------------------------------------------------------ free reduction

/// With V = 0: T ≡ 1, Ψ = e^{iτx}, F_V = F and |J_V|^s = |J|^s.
inline Measurement free_reduction(const SpatialGrid& g, double limit = 1e-8) {
  const Potential v = sample_potential(potentials::Zero{}, g);
  const UnitarityResult sd = unitarity(v, default_tau_grid(), 1.0);
  double t_err = 0.0;
  for (cplx t : sd.data.T) t_err = std::max(t_err, std::abs(t - 1.0));

  const DistortedBasis b = build_distorted_basis(v);
  double psi_err = 0.0;
  for (int k = 0; k < g.size(); ++k)
    for (int i = 0; i < g.size(); ++i)
      psi_err = std::max(psi_err, std::abs(b.psi(i, k) - std::exp(I * (b.tau(k) * g.x(i)))));

  double f_err = 0.0, j_err = 0.0;
  for (const CVec& f : schwartz_battery(g, 10)) {
    const CVec ref = fourier_forward(g, f);
    f_err = std::max(f_err, relative_l2(g, distorted_forward(b, f), ref));
    for (double s : {0.3, 0.6, 1.0})
      for (double t : {1.0, 5.0}) {
        const CVec jf = weighted_J_power(b, s, t, f, Spectrum::free);
        j_err = std::max(j_err, relative_l2(g, weighted_J_power(b, s, t, f, Spectrum::potential), jf));
      }
  }
  const double worst = std::max({t_err, psi_err, f_err, j_err});
  return below("free_reduction", worst, limit,
               "T " + fmt(t_err) + ", Psi " + fmt(psi_err) + ", F_V " + fmt(f_err) + ", J_V " + fmt(j_err));
}

// ------------------------------------------------------------------ spectral

inline Measurement plancherel(const DistortedBasis& b, int battery, double limit = 1e-6) {
  const SpatialGrid& g = b.grid();
  double worst = 0.0;
  for (const CVec& f : schwartz_battery(g, battery)) {
    const double ratio = std::sqrt((distorted_forward(b, f).squaredNorm() * g.dxi()) / (f.squaredNorm() * g.dx()));
    worst = std::max(worst, std::abs(ratio - 1.0));
  }
  return below("plancherel[" + descriptor_name(b.potential.descriptor) + "]", worst, limit);
}

inline CVec centered_gaussian(const SpatialGrid& g, double center = 0.0) {
  return sample(g, [center](double x) { return cplx(std::exp(-0.5 * (x - center) * (x - center))); });
}

/// Kato integral against the spectral multiplier for each s, on a Gaussian.
inline Measurement kato_vs_multiplier(const DistortedBasis& b, const std::vector<double>& powers, CsvTable* table,
                                      double limit = 1e-3) {
  const SpatialGrid& g = b.grid();
  const CVec f = centered_gaussian(g);
  double worst = 0.0;
  for (double s : powers) {
    const double e = relative_l2(g, kato_fractional(b.potential, s, f), fractional_power(b, s, f, Spectrum::potential));
    if (table) table->add({s, e});
    worst = std::max(worst, e);
  }
  return below("kato_vs_multiplier", worst, limit);
}

/// Sample a resolvent-bound constant on a log grid of τ and repeat on the
/// refined grid; the check needs finite constants and a stable supremum.
struct ResolventConstants {
  std::vector<double> taus, green, green_fine, sandwich, sandwich_fine;
  Measurement green_check, sandwich_check;
};

inline ResolventConstants resolvent_constants(const PotentialDescriptor& d, const SpatialGrid& g, int taus_per_decade,
                                              double limit = 0.1) {
  ResolventConstants r;
  const SpatialGrid fine = g.refined(2);
  const Potential v = sample_potential(d, g), vf = sample_potential(d, fine);
  const CVec f = centered_gaussian(g), ff = centered_gaussian(fine);
  const int count = 4 * taus_per_decade + 1;
  for (int q = 0; q < count; ++q) r.taus.push_back(std::pow(10.0, -2.0 + q / static_cast<double>(taus_per_decade)));
  r.green.resize(count);
  r.green_fine.resize(count);
  r.sandwich.resize(count);
  r.sandwich_fine.resize(count);
  parallel_for(count, [&](int q) {
    const double tau = r.taus[q];
    r.green[q] = green_bound_constant(v, tau, f);
    r.green_fine[q] = green_bound_constant(vf, tau, ff);
    r.sandwich[q] = sandwich_bound_constant(v, tau, f);
    r.sandwich_fine[q] = sandwich_bound_constant(vf, tau, ff);
  });
  auto judge = [&](const char* name, const std::vector<double>& a, const std::vector<double>& b) {
    const double ca = *std::max_element(a.begin(), a.end()), cb = *std::max_element(b.begin(), b.end());
    const double change = std::abs(cb / ca - 1.0);
    return below(name, std::isfinite(ca) && std::isfinite(cb) ? change : INFINITY, limit,
                 "C " + fmt(ca) + " -> " + fmt(cb));
  };
  r.green_check = judge("green_bound_constant", r.green, r.green_fine);
  r.sandwich_check = judge("sandwich_bound_constant", r.sandwich, r.sandwich_fine);
  return r;
}

// ------------------------------------------------------- norm equivalence

struct QuasidiagResult {
  QuasidiagSweep sweep;
  Measurement check;
};

/// The pairing ratio must stay below `bound` and its envelope over |k-j|
/// must not grow; the sweep has to reach `max_separation`.
inline QuasidiagResult quasidiagonality(const DistortedBasis& b, int min_modes, int max_separation, double bound) {
  QuasidiagResult r;
  r.sweep = quasidiag_sweep(b, lp_window(b.grid(), min_modes), max_separation);
  std::string env;
  for (const auto& [d, m] : r.sweep.envelope) env += (env.empty() ? "" : " ") + std::to_string(d) + ":" + fmt(m);
  r.check.name = "quasidiag[" + descriptor_name(b.potential.descriptor) + "]";
  r.check.value = r.sweep.max_ratio;
  r.check.limit = bound;
  r.check.pass = r.sweep.max_ratio < bound && r.sweep.nongrowing && r.sweep.max_separation >= max_separation;
  r.check.detail = "reach " + std::to_string(r.sweep.max_separation) + (r.sweep.nongrowing ? ", nongrowing" : ", envelope grows") +
                   ", envelope " + env;
  return r;
}

struct NormBand {
  double s = 0.0;
  double lo = 0.0, hi = 0.0;  // ratio range on the battery
  double constant() const { return std::max(hi, 1.0 / lo); }
};

inline NormBand norm_band(const DistortedBasis& b, double s, int battery) {
  NormBand n{s, INFINITY, 0.0};
  for (const CVec& f : schwartz_battery(b.grid(), battery)) {
    const double r = norm_equiv_ratio(b, s, f).ratio;
    n.lo = std::min(n.lo, r);
    n.hi = std::max(n.hi, r);
  }
  return n;
}

/// C = max(hi, 1/lo) measured on b, then compared with the refined basis.
inline Measurement norm_equivalence(const DistortedBasis& b, const DistortedBasis& fine, const std::vector<double>& powers,
                                    int battery, CsvTable* table, double limit = 0.1) {
  double worst = 0.0;
  std::string detail;
  for (double s : powers) {
    const NormBand c = norm_band(b, s, battery), f = norm_band(fine, s, battery);
    const double change = std::abs(f.constant() / c.constant() - 1.0);
    if (table) table->add({s, c.lo, c.hi, c.constant(), f.constant(), change});
    worst = std::max(worst, change);
    detail += (detail.empty() ? "C " : ", ") + fmt(c.constant());
  }
  return below("norm_equivalence", worst, limit, detail);
}

// ---------------------------------------------------------- commutator check

/// ||A(s) f||_1 / ||f||_∞ must agree between the two routes and survive one
/// refinement.
inline Measurement a_route_agreement(const DistortedBasis& b, const std::vector<double>& powers, CsvTable* table,
                                     double limit = 1e-3) {
  const SpatialGrid& g = b.grid();
  const CVec f = centered_gaussian(g);
  double worst = 0.0;
  for (double s : powers) {
    const CVec c = A_apply(b, s, f, ARoute::commutator), k = A_apply(b, s, f, ARoute::kato);
    const double e = relative_l2(g, c, k);
    if (table) table->add({s, e});
    worst = std::max(worst, e);
  }
  return below("A_route_agreement", worst, limit);
}

inline Measurement a_bound_stability(const DistortedBasis& b, const DistortedBasis& fine, const std::vector<double>& powers,
                                     CsvTable* table, double limit = 0.1) {
  double worst = 0.0;
  std::string detail;
  for (double s : powers) {
    const double c = A_bound_ratio(b, s, centered_gaussian(b.grid()), ARoute::commutator);
    const double f = A_bound_ratio(fine, s, centered_gaussian(fine.grid()), ARoute::commutator);
    const double change = std::isfinite(c) && std::isfinite(f) ? std::abs(f / c - 1.0) : INFINITY;
    if (table) table->add({s, c, f, change});
    worst = std::max(worst, change);
    detail += (detail.empty() ? "C " : ", ") + fmt(c);
  }
  return below("A_bound_stability", worst, limit, detail);
}

/// Largest relative residual ||r||/|| |J_V|^s u || of the linear trajectory
/// u(t) = e^{itΔ_V} u0 sampled at five points centred on t_c.
inline double linear_residual(const DistortedBasis& b, double s, const CVec& u0, double tc, double dt) {
  const CVec start = evolve_linear(b, 0.0, tc - 2.0 * dt, u0);
  const auto res = commutator_residual(b, s, linear_trajectory(b, start, tc - 2.0 * dt, dt, 5));
  double worst = 0.0;
  for (const ResidualSample& r : res) worst = std::max(worst, r.residual / r.norm);
  return worst;
}

/// Residual shrinks at least `factor` when dt → dt/4.
inline Measurement residual_convergence(const DistortedBasis& b, double s, const CVec& u0, double tc, double dt,
                                        double factor = 8.0) {
  const double coarse = linear_residual(b, s, u0, tc, dt), fine = linear_residual(b, s, u0, tc, 0.25 * dt);
  Measurement m;
  m.name = "residual_convergence[" + descriptor_name(b.potential.descriptor) + "]";
  m.value = coarse / fine;
  m.limit = factor;
  m.pass = std::isfinite(m.value) && m.value >= factor;
  m.detail = fmt(coarse) + " -> " + fmt(fine);
  return m;
}

// --------------------------------------------------------------------- decay

inline std::vector<Measurement> judge_decay(const DecayExperiment& e, const std::string& tag) {
  const DecayRecord& r = e.record;
  std::vector<Measurement> out;
  Measurement sup{"sup_sqrt_t" + tag, r.sup_sqrt_t, 0.0, std::isfinite(r.sup_sqrt_t) && r.last_decade_nonincreasing,
                  r.last_decade_nonincreasing ? "non-increasing over the last decade" : "increases in the last decade"};
  out.push_back(sup);
  out.push_back({"decay_exponent" + tag, r.alpha, 0.5, r.alpha >= 0.45 && r.alpha <= 0.55, "window [0.45, 0.55]"});
  out.push_back(below("jv_growth" + tag, r.jv_growth, 2.0));
  out.push_back(below("charge_drift" + tag, e.drift.max_relative_drift, 1e-6));
  std::string d;
  for (double c : e.scattering.cauchy) d += (d.empty() ? "" : " ") + fmt(c);
  out.push_back({"scattering_cauchy" + tag, e.scattering.cauchy.empty() ? 0.0 : e.scattering.cauchy.back(), 0.0,
                 e.scattering.decreasing, d});
  return out;
}

}  // namespace nlsv::checks
