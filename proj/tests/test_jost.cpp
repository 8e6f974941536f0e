#include <gtest/gtest.h>

#include <array>
#include <boost/numeric/odeint.hpp>

#include "nlsv/jost/scattering.hpp"

using namespace nlsv;

namespace {

const SpatialGrid kGrid(40.0, 2048);

/// f'' = (V - τ²) f from x0 (where f = e^{iτx}) down to x1, adaptive
/// Dormand-Prince: an integrator unrelated to the one under test.
cplx odeint_jost_plus(const PotentialDescriptor& d, double tau, double x0, double x1) {
  using State = std::array<double, 4>;  // Re f, Im f, Re f', Im f'
  const cplx f0 = std::exp(I * tau * x0), df0 = I * tau * f0;
  State y{f0.real(), f0.imag(), df0.real(), df0.imag()};
  auto rhs = [&](const State& s, State& ds, double x) {
    const double q = evaluate(d, x) - tau * tau;
    ds = {s[2], s[3], q * s[0], q * s[1]};
  };
  namespace ode = boost::numeric::odeint;
  ode::integrate_adaptive(ode::make_controlled(1e-13, 1e-13, ode::runge_kutta_dopri5<State>()), rhs, y, x0, x1, -1e-3);
  return {y[0], y[1]};
}

}  // namespace

TEST(Jost, MatchesIndependentIntegrator) {
  const PotentialDescriptor d = potentials::GaussianBarrier{1, 1};
  const Potential v = sample_potential(d, kGrid);
  for (double tau : {0.3, 1.0, 4.0}) {
    const JostSolution s = solve_jost(v, tau);
    const int i0 = kGrid.size() / 2 - 128;  // x = -5
    const double x = kGrid.x(i0);
    const cplx ref = odeint_jost_plus(d, tau, 12.0, x);
    EXPECT_LT(std::abs(std::exp(I * tau * x) * s.m_plus[i0] - ref), 1e-8) << "tau " << tau;
  }
}

TEST(Jost, SolitonWellClosedForm) {
  // f_+ = e^{iτx}(τ + iκ tanh κx)/(τ + iκ)
  const double kappa = 1.0;
  const Potential v = sample_potential(potentials::SolitonWell{kappa}, kGrid);
  for (double tau : {0.5, 2.0}) {
    const JostSolution s = solve_jost(v, tau);
    double err = 0.0;
    for (int i = 0; i < kGrid.size(); i += 7)
      err = std::max(err, std::abs(s.m_plus[i] - (tau + I * kappa * std::tanh(kappa * kGrid.x(i))) / (tau + I * kappa)));
    EXPECT_LT(err, 1e-8);
  }
}

TEST(Jost, ResidualAndWronskianConstancy) {
  const Potential v = sample_potential(potentials::GaussianBarrier{1, 1}, kGrid);
  const JostSolution s = solve_jost(v, 1.5);
  EXPECT_LT(jost_residual(v, s), 1e-5);
  const cplx w0 = wronskian_at(s, 600), w1 = wronskian_at(s, 1500);
  EXPECT_LT(std::abs(w0 - w1), 1e-9 * std::abs(w0));
}

TEST(Scattering, SolitonWellReflectionless) {
  const Potential v = sample_potential(potentials::SolitonWell{1.0}, kGrid);
  const ScatteringData sd = scattering_data(v, default_tau_grid(10.0, 0.1));
  double err = 0.0, refl = 0.0;
  for (std::size_t k = 0; k < sd.size(); ++k) {
    const double t = sd.taus[k];
    err = std::max(err, std::abs(sd.T[k] - (t + I) / (t - I)));
    refl = std::max({refl, std::abs(sd.R_plus[k]), std::abs(sd.R_minus[k])});
  }
  EXPECT_LT(err, 1e-8);
  EXPECT_LT(refl, 1e-8);
  EXPECT_TRUE(scattering_sanity(sd).reflectionless);
  EXPECT_EQ(count_bound_states(v), 1);
}

TEST(Scattering, SquareBarrierTextbookFormula) {
  // t = e^{-2ika} / (cos 2qa - i (k² + q²)/(2kq) sin 2qa), q² = k² - v0
  const double v0 = 4.0, a = 1.0;
  const Potential v = sample_potential(potentials::SquareBarrier{v0, a}, kGrid);
  const std::vector<double> taus{0.1, 0.7, 1.9, 2.3, 5.0, 10.0};
  const ScatteringData sd = scattering_data(v, taus);
  for (std::size_t k = 0; k < taus.size(); ++k) {
    const cplx kk = taus[k], q = std::sqrt(cplx(taus[k] * taus[k] - v0));
    const cplx t = std::exp(-2.0 * I * kk * a) /
                   (std::cos(2.0 * q * a) - I * (kk * kk + q * q) / (2.0 * kk * q) * std::sin(2.0 * q * a));
    EXPECT_LT(std::abs(sd.T[k] - t), 1e-8) << "tau " << taus[k];
  }
}

TEST(Scattering, UnitarityAndFreeCase) {
  const ScatteringData sd = scattering_data(sample_potential(potentials::GaussianBarrier{1, 1}, kGrid), default_tau_grid());
  EXPECT_LT(sd.unitarity_defect(), 1e-10);
  const ScatteringData zero = scattering_data(sample_potential(potentials::Zero{}, kGrid), default_tau_grid());
  for (cplx t : zero.T) EXPECT_EQ(t, cplx(1.0));
  EXPECT_THROW(scattering_data(sample_potential(potentials::Zero{}, kGrid), {0.0}), PreconditionError);
}

TEST(Scattering, Classification) {
  auto classify = [](const PotentialDescriptor& d) {
    return classify_potential(scattering_data(sample_potential(d, kGrid), default_tau_grid(2.0, 0.1))).kind;
  };
  EXPECT_EQ(classify(potentials::GaussianBarrier{1, 1}), Genericity::generic);
  EXPECT_EQ(classify(potentials::ZeroResonance{0.3}), Genericity::transparent);
  EXPECT_EQ(classify(potentials::Zero{}), Genericity::transparent);
  EXPECT_EQ(classify(potentials::SolitonWell{1.0}), Genericity::exceptional_other);
  EXPECT_EQ(count_bound_states(sample_potential(potentials::GaussianBarrier{1, 1}, kGrid)), 0);
  EXPECT_EQ(count_bound_states(sample_potential(potentials::ZeroResonance{0.3}, kGrid)), 0);
}
