#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "nlsv/core/quadrature.hpp"

namespace nlsv {

namespace potentials {
struct Zero {};
/// v0 * exp(-x^2 / (2 sigma^2)); repulsive for v0 > 0, generic.
struct GaussianBarrier {
  double v0 = 1.0;
  double sigma = 1.0;
};
/// -2 kappa^2 sech^2(kappa x): reflectionless, one bound state at -kappa^2.
struct SolitonWell {
  double kappa = 1.0;
};
/// v0 on |x| < a. Discontinuous; used only against closed-form oracles.
struct SquareBarrier {
  double v0 = 4.0;
  double a = 1.0;
};
/// psi''/psi with psi = 1 + b exp(-x^2/2), b > -1. The zero-energy solution psi
/// is bounded and positive, so there is no bound state and T(0) = 1.
struct ZeroResonance {
  double b = 0.3;
};
}  // namespace potentials

using PotentialDescriptor = std::variant<potentials::Zero, potentials::GaussianBarrier, potentials::SolitonWell,
                                         potentials::SquareBarrier, potentials::ZeroResonance>;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline double evaluate(const PotentialDescriptor& d, double x) {
  using namespace potentials;
  return std::visit(overloaded{
                        [](const Zero&) { return 0.0; },
                        [x](const GaussianBarrier& p) { return p.v0 * std::exp(-x * x / (2.0 * p.sigma * p.sigma)); },
                        [x](const SolitonWell& p) {
                          const double c = std::cosh(p.kappa * x);
                          return -2.0 * p.kappa * p.kappa / (c * c);
                        },
                        [x](const SquareBarrier& p) { return std::abs(x) < p.a ? p.v0 : 0.0; },
                        [x](const ZeroResonance& p) {
                          const double e = std::exp(-0.5 * x * x);
                          return p.b * (x * x - 1.0) * e / (1.0 + p.b * e);
                        },
                    },
                    d);
}

inline std::string descriptor_name(const PotentialDescriptor& d) {
  using namespace potentials;
  return std::visit(overloaded{
                        [](const Zero&) { return std::string("zero"); },
                        [](const GaussianBarrier&) { return std::string("gaussian_barrier"); },
                        [](const SolitonWell&) { return std::string("soliton_well"); },
                        [](const SquareBarrier&) { return std::string("square_barrier"); },
                        [](const ZeroResonance&) { return std::string("zero_resonance"); },
                    },
                    d);
}

inline bool is_zero(const PotentialDescriptor& d) { return std::holds_alternative<potentials::Zero>(d); }

/// Points where V is not smooth; the Jost integrator never steps across them.
inline std::vector<double> breakpoints(const PotentialDescriptor& d) {
  if (auto p = std::get_if<potentials::SquareBarrier>(&d)) return {-p->a, p->a};
  return {};
}

/// Length scale used by the truncation gate.
inline double effective_width(const PotentialDescriptor& d) {
  using namespace potentials;
  return std::visit(overloaded{
                        [](const Zero&) { return 0.0; },
                        [](const GaussianBarrier& p) { return p.sigma; },
                        [](const SolitonWell& p) { return 1.0 / p.kappa; },
                        [](const SquareBarrier& p) { return p.a; },
                        [](const ZeroResonance&) { return 1.0; },
                    },
                    d);
}

/// Radius beyond which <x>^3 |V| stays below `floor`; 0 for V = 0.
inline double support_radius(const PotentialDescriptor& d, double floor = 1e-22) {
  if (is_zero(d)) return 0.0;
  if (auto p = std::get_if<potentials::SquareBarrier>(&d)) return p->a;
  const double step = 0.01;
  for (double r = 2000.0; r > 0.0; r -= step) {
    const double w = std::pow(japanese(r), 3.0);
    if (w * std::abs(evaluate(d, r)) > floor || w * std::abs(evaluate(d, -r)) > floor) return r + step;
  }
  return step;
}

class AdmissibilityError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Sampled real potential with cached weighted norms ||V||_{L^{1,s}}, s = 1, 2, 3.
struct Potential {
  PotentialDescriptor descriptor;
  SpatialGrid grid;
  RVec samples;
  std::array<double, 3> weighted{};  // s = 1, 2, 3
  double tail_mass = 0.0;
  double support = 0.0;

  double operator()(double x) const { return evaluate(descriptor, x); }
  double l11() const { return weighted[0]; }
  double l12() const { return weighted[1]; }
  double l13() const { return weighted[2]; }
  bool zero() const { return is_zero(descriptor); }
};

/// int_{|x| > r} <x>^3 |V| by fine trapezoid on the analytic profile.
inline double tail_mass(const PotentialDescriptor& d, double r) {
  const double outer = support_radius(d, 1e-30);
  if (outer <= r) return 0.0;
  const double h = 1e-3;
  double acc = 0.0;
  for (double x = r; x < outer; x += h) {
    const double a = std::pow(japanese(x), 3.0) * (std::abs(evaluate(d, x)) + std::abs(evaluate(d, -x)));
    const double b = std::pow(japanese(x + h), 3.0) * (std::abs(evaluate(d, x + h)) + std::abs(evaluate(d, -x - h)));
    acc += 0.5 * h * (a + b);
  }
  return acc;
}

inline Potential sample_potential(const PotentialDescriptor& d, const SpatialGrid& g, double tail_tolerance = 1e-10) {
  std::visit(overloaded{
                 [](const potentials::Zero&) {},
                 [](const potentials::GaussianBarrier& p) {
                   require(std::isfinite(p.v0) && p.sigma > 0.0, "gaussian_barrier needs finite v0 and sigma > 0");
                 },
                 [](const potentials::SolitonWell& p) { require(p.kappa > 0.0, "soliton_well needs kappa > 0"); },
                 [](const potentials::SquareBarrier& p) {
                   require(std::isfinite(p.v0) && p.a > 0.0, "square_barrier needs finite v0 and a > 0");
                 },
                 [](const potentials::ZeroResonance& p) { require(p.b > -1.0, "zero_resonance needs b > -1"); },
             },
             d);
  Potential v{d, g, RVec(g.size()), {}, 0.0, support_radius(d)};
  for (int i = 0; i < g.size(); ++i) v.samples[i] = evaluate(d, g.x(i));
  if (!v.zero()) {
    v.tail_mass = tail_mass(d, g.half_width() - 4.0 * effective_width(d));
    if (!(v.tail_mass < tail_tolerance))
      throw AdmissibilityError("potential tail mass " + std::to_string(v.tail_mass) +
                               " exceeds tolerance for half width " + std::to_string(g.half_width()));
  }
  const CVec c = v.samples.cast<cplx>();
  for (int s = 1; s <= 3; ++s) v.weighted[s - 1] = weighted_norm(g, c, 1, s);
  return v;
}

/// V_1 = 2V + x V', with V' taken spectrally from the samples.
inline RVec virial_potential(const Potential& v) {
  const SpatialGrid& g = v.grid;
  const CVec dv = spectral_derivative(g, v.samples);
  RVec out(g.size());
  for (int i = 0; i < g.size(); ++i) out[i] = 2.0 * v.samples[i] + g.x(i) * dv[i].real();
  return out;
}

}  // namespace nlsv
