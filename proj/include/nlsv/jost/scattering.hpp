#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlsv/core/parallel.hpp"
#include "nlsv/jost/jost.hpp"

namespace nlsv {

enum class Genericity { generic, transparent, exceptional_other };

inline std::string to_string(Genericity g) {
  switch (g) {
    case Genericity::generic: return "generic";
    case Genericity::transparent: return "transparent";
    default: return "exceptional_other";
  }
}

/// Per-momentum Wronskian and scattering coefficients at strictly positive
/// nodes; values at -τ follow from conjugation (real potential).
struct ScatteringData {
  std::vector<double> taus;
  std::vector<cplx> w, T, R_plus, R_minus;
  std::optional<Genericity> genericity;

  std::size_t size() const { return taus.size(); }
  double unitarity_defect() const {
    double worst = 0.0;
    for (std::size_t k = 0; k < size(); ++k) {
      worst = std::max(worst, std::abs(std::norm(T[k]) + std::norm(R_plus[k]) - 1.0));
      worst = std::max(worst, std::abs(std::norm(T[k]) + std::norm(R_minus[k]) - 1.0));
    }
    return worst;
  }
};

struct ScatteringOptions {
  JostOptions jost{};
  double unitarity_tolerance = 1e-6;
  double edge_fraction = 0.1;
};

/// Smallest node spacing close to zero momentum.
inline constexpr double kTauFloor = 1e-3;
inline constexpr double kGenericityTolerance = 1e-3;

/// δ, 2δ, ..., up to 0.512, then uniform steps to `tau_max`.
inline std::vector<double> default_tau_grid(double tau_max = 20.0, double step = 0.05) {
  std::vector<double> t;
  for (double x = kTauFloor; x < 0.6; x *= 2.0) t.push_back(x);
  for (double x = 0.55; x <= tau_max + 1e-12; x += step) t.push_back(x);
  return t;
}

struct MomentumCoefficients {
  cplx w, T, R_plus, R_minus;
};

/// Coefficients from one Jost solve: T = 2iτ/w, R_± by least squares on the
/// defining relation over the outer `edge_fraction` of the grid.
inline MomentumCoefficients coefficients_from(const SpatialGrid& g, const JostSolution& s, double edge_fraction = 0.1) {
  const double tau = s.tau.real();
  MomentumCoefficients c{};
  c.w = wronskian(s, g);
  if (std::abs(c.w) < 1e-12 * std::max(1.0, tau))
    throw NumericalError("vanishing Wronskian at tau = " + std::to_string(tau));
  c.T = 2.0 * I * tau / c.w;
  const int n = g.size();
  const int band = std::max(4, static_cast<int>(edge_fraction * n));
  auto fit = [](auto&& a_of, auto&& b_of, int from, int to) {
    cplx num = 0.0;
    double den = 0.0;
    for (int i = from; i < to; ++i) {
      const cplx a = a_of(i);
      num += std::conj(a) * b_of(i);
      den += std::norm(a);
    }
    return num / den;
  };
  // T m_- = R_+ e^{2iτx} m_+ + m_+(x,-τ)
  c.R_plus = fit([&](int i) { return std::exp(2.0 * I * tau * g.x(i)) * s.m_plus[i]; },
                 [&](int i) { return c.T * s.m_minus[i] - std::conj(s.m_plus[i]); }, n - band, n);
  // T m_+ = R_- e^{-2iτx} m_- + m_-(x,-τ)
  c.R_minus = fit([&](int i) { return std::exp(-2.0 * I * tau * g.x(i)) * s.m_minus[i]; },
                  [&](int i) { return c.T * s.m_plus[i] - std::conj(s.m_minus[i]); }, 0, band);
  return c;
}

inline ScatteringData scattering_data(const Potential& v, const std::vector<double>& taus,
                                      const ScatteringOptions& opt = {}) {
  for (double t : taus) require(t >= kTauFloor * (1.0 - 1e-12), "tau nodes must stay at least 1e-3 away from 0");
  ScatteringData sd;
  sd.taus = taus;
  const std::size_t n = taus.size();
  sd.w.resize(n);
  sd.T.resize(n);
  sd.R_plus.resize(n);
  sd.R_minus.resize(n);
  parallel_for(static_cast<int>(n), [&](int k) {
    const JostSolution s = solve_jost(v, taus[k], opt.jost);
    const MomentumCoefficients c = coefficients_from(v.grid, s, opt.edge_fraction);
    sd.w[k] = c.w;
    sd.T[k] = c.T;
    sd.R_plus[k] = c.R_plus;
    sd.R_minus[k] = c.R_minus;
  });
  const double defect = sd.unitarity_defect();
  if (defect > opt.unitarity_tolerance)
    throw NumericalError("scattering data violates unitarity by " + std::to_string(defect));
  return sd;
}

struct Classification {
  Genericity kind;
  cplx T0;                 // three-point extrapolation
  cplx T0_low_order;       // two-point extrapolation
  cplx R_plus0;
  cplx essential;          // T(0) - 1 - R_+(0)
};

class ClassificationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Extrapolates T and R_+ to τ = 0 from the nodes δ, 2δ, 4δ.
inline Classification classify_potential(const ScatteringData& sd, double tolerance = kGenericityTolerance) {
  require(sd.size() >= 3, "classification needs at least three nodes");
  std::vector<std::size_t> order(sd.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return sd.taus[a] < sd.taus[b]; });
  const std::size_t a = order[0], b = order[1], c = order[2];
  const double h = sd.taus[a];
  require(std::abs(sd.taus[b] - 2 * h) < 1e-9 * h && std::abs(sd.taus[c] - 4 * h) < 1e-9 * h,
          "classification needs nodes δ, 2δ, 4δ at the bottom of the τ grid");
  auto extrap3 = [&](const std::vector<cplx>& y) { return (8.0 * y[a] - 6.0 * y[b] + y[c]) / 3.0; };
  auto extrap2 = [&](const std::vector<cplx>& y) { return 2.0 * y[a] - y[b]; };
  Classification out{};
  out.T0 = extrap3(sd.T);
  out.T0_low_order = extrap2(sd.T);
  out.R_plus0 = extrap3(sd.R_plus);
  out.essential = out.T0 - 1.0 - out.R_plus0;
  if (std::abs(out.T0 - out.T0_low_order) > tolerance)
    throw ClassificationError("T(0) extrapolations disagree; refine the τ grid near zero");
  if (std::abs(out.T0) < tolerance) out.kind = Genericity::generic;
  else if (std::abs(out.T0 - 1.0) < tolerance) out.kind = Genericity::transparent;
  else out.kind = Genericity::exceptional_other;
  return out;
}

struct SanityReport {
  double transmission_decay = 0.0;   // sup <τ>|T - 1|
  double reflection_decay_plus = 0.0;  // sup <τ>|R_+|
  double reflection_decay_minus = 0.0;
  double transmission_slope = 0.0;   // sup |dT/dτ|
  double max_reflection = 0.0;
  bool reflectionless = false;
  bool finite = true;
};

inline SanityReport scattering_sanity(const ScatteringData& sd, double reflectionless_tolerance = 1e-6) {
  SanityReport r;
  for (std::size_t k = 0; k < sd.size(); ++k) {
    const double jt = japanese(sd.taus[k]);
    r.transmission_decay = std::max(r.transmission_decay, jt * std::abs(sd.T[k] - 1.0));
    r.reflection_decay_plus = std::max(r.reflection_decay_plus, jt * std::abs(sd.R_plus[k]));
    r.reflection_decay_minus = std::max(r.reflection_decay_minus, jt * std::abs(sd.R_minus[k]));
    r.max_reflection = std::max({r.max_reflection, std::abs(sd.R_plus[k]), std::abs(sd.R_minus[k])});
    if (k + 1 < sd.size()) {
      const double dt = sd.taus[k + 1] - sd.taus[k];
      r.transmission_slope = std::max(r.transmission_slope, std::abs(sd.T[k + 1] - sd.T[k]) / dt);
    }
  }
  r.reflectionless = r.max_reflection < reflectionless_tolerance;
  for (double c : {r.transmission_decay, r.reflection_decay_plus, r.reflection_decay_minus, r.transmission_slope})
    r.finite = r.finite && std::isfinite(c) && c < 1e6;
  return r;
}

/// Counts sign changes of the (real) Wronskian along the positive imaginary
/// momentum axis; each is a negative eigenvalue of -Δ_V.
inline int count_bound_states(const Potential& v, int samples = 200) {
  if (v.zero()) return 0;
  const double depth = std::max(0.0, -v.samples.minCoeff());
  const double top = std::sqrt(depth) + 1.0;
  JostOptions opt;
  opt.verify = false;
  auto w_at = [&](double sigma) { return wronskian(solve_jost(v, cplx(0.0, sigma), opt), v.grid).real(); };
  int changes = 0;
  double prev = w_at(top);
  for (int i = samples - 1; i >= 0; --i) {
    const double sigma = kTauFloor * std::pow(top / kTauFloor, static_cast<double>(i) / samples);
    const double cur = w_at(sigma);
    if ((cur > 0.0) != (prev > 0.0)) ++changes;
    prev = cur;
  }
  return changes;
}

}  // namespace nlsv
