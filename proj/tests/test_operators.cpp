#include <gtest/gtest.h>

#include "nlsv/operators/commutator.hpp"
#include "nlsv/dynamics/evolution.hpp"

using namespace nlsv;

namespace {

const SpatialGrid kGrid(40.0, 1024);

double rel(const CVec& a, const CVec& ref) { return (a - ref).norm() / ref.norm(); }

CVec gaussian(const SpatialGrid& g, double c = 0.0) {
  return sample(g, [c](double x) { return cplx(std::exp(-0.5 * (x - c) * (x - c))); });
}

// e^{itΔ} e^{-x²/2} = (1+2it)^{-1/2} e^{-x²/(2(1+2it))}
CVec spreading_gaussian(const SpatialGrid& g, double t) {
  const cplx w(1.0, 2.0 * t);
  CVec v(g.size());
  for (int i = 0; i < g.size(); ++i) v[i] = std::exp(-g.x(i) * g.x(i) / (2.0 * w)) / std::sqrt(w);
  return v;
}

const DistortedBasis& free_basis() {
  static const DistortedBasis b = [] {
    BasisOptions o;
    o.with_derivative = true;
    return build_distorted_basis(sample_potential(potentials::Zero{}, kGrid), o);
  }();
  return b;
}

const DistortedBasis& barrier_basis() {
  static const DistortedBasis b = [] {
    BasisOptions o;
    o.with_derivative = true;
    return build_distorted_basis(sample_potential(potentials::GaussianBarrier{1, 1}, kGrid), o);
  }();
  return b;
}

}  // namespace

TEST(Gauge, PlusInvertsMinus) {
  const CVec f = schwartz_battery(kGrid, 2)[1];
  EXPECT_LT(rel(gauge(kGrid, 0.7, GaugeSign::plus, gauge(kGrid, 0.7, GaugeSign::minus, f)), f), 1e-15);
  EXPECT_THROW(gauge(kGrid, 0.0, GaugeSign::plus, f), PreconditionError);
}

TEST(FreePropagator, MatchesClosedForm) {
  for (double t : {0.3, 2.0})
    EXPECT_LT(rel(free_propagator(kGrid, t, gaussian(kGrid)), spreading_gaussian(kGrid, t)), 1e-12) << t;
}

TEST(FreePropagator, FactoredFormMatchesClosedForm) {
  for (double t : {0.5, 2.0})
    EXPECT_LT(rel(free_propagator_factored(kGrid, t, gaussian(kGrid)), spreading_gaussian(kGrid, t)), 1e-10) << t;
}

TEST(FreePropagator, ConjugationIdentity) {
  // a Gaussian g keeps the kernel of g(2tp) well inside the periodic box
  const auto [lhs, rhs] = conjugation_identity(kGrid, 1.0, [](double x) { return std::exp(-x * x / 8.0); }, gaussian(kGrid, 1.0));
  EXPECT_LT(rel(lhs, rhs), 1e-10);
}

TEST(VectorField, ConjugatesPositionAlongTheFlow) {
  // J(t) e^{itΔ} f = e^{itΔ} (x f)
  const CVec f = gaussian(kGrid);
  const CVec xf = sample(kGrid, [](double x) { return cplx(x * std::exp(-0.5 * x * x)); });
  const double t = 1.5;
  EXPECT_LT(rel(vector_field_J(kGrid, t, free_propagator(kGrid, t, f)), free_propagator(kGrid, t, xf)), 1e-10);
}

TEST(VectorField, FreeWeightedPowerAgainstJ) {
  // |J(t)| = M(t) t|p| M(-t) while J(t) = M(t) 2tp M(-t), so the norms differ by 2
  const double t = 0.8;
  const CVec u = free_propagator(kGrid, t, gaussian(kGrid, 0.5));
  EXPECT_NEAR(2.0 * l2_norm(kGrid, weighted_J_power(free_basis(), 1.0, t, u, Spectrum::free)),
              l2_norm(kGrid, vector_field_J(kGrid, t, u)), 1e-10);
}

TEST(VectorField, FreeBasisMakesTheTwoNormsEqual) {
  const InvariantNormRecord r = invariant_norms(free_basis(), 0.6, 2.0, gaussian(kGrid));
  EXPECT_NEAR(r.potential / r.free, 1.0, 1e-12);
}

TEST(Commutator, VanishesWithoutPotential) {
  // with V = 0 the dilation commutator is -s(-Δ)^{s/2}, so A(s) = 0; the
  // spectrum of f sits far from ξ = 0, where |ξ|^s would leave algebraic tails
  const CVec f = sample(kGrid, [](double x) { return std::exp(-0.5 * x * x) * std::exp(cplx(0.0, 8.0 * x)); });
  const double scale = l2_norm(kGrid, fractional_power(free_basis(), 0.6, f, Spectrum::free));
  EXPECT_LT(l2_norm(kGrid, A_apply(free_basis(), 0.6, f, ARoute::commutator)) / scale, 1e-8);
  EXPECT_LT(l2_norm(kGrid, A_apply(free_basis(), 0.6, f, ARoute::kato)), 1e-14);
}

TEST(Commutator, RoutesAgreeForTheBarrier) {
  const CVec f = gaussian(kGrid);
  const CVec a = A_apply(barrier_basis(), 1.0, f, ARoute::kato);
  EXPECT_LT(rel(A_apply(barrier_basis(), 1.0, f, ARoute::commutator), a), 1e-2);
}

TEST(Commutator, LinearResidualSmallInFreeCase) {
  const CVec u0 = gaussian(kGrid, 6.0);
  const Trajectory traj = free_trajectory(kGrid, u0, 0.0, 0.0125, 200);
  const Trajectory window(traj.begin() + 158, traj.begin() + 163);
  for (const ResidualSample& r : commutator_residual(free_basis(), 0.6, window))
    EXPECT_LT(r.residual / r.norm, 1e-5) << r.t;
}

TEST(Commutator, ResidualNeedsFiveSamples) {
  const Trajectory traj = free_trajectory(kGrid, gaussian(kGrid), 1.0, 0.1, 4);
  EXPECT_THROW(commutator_residual(free_basis(), 0.6, traj), TrajectoryError);
}

TEST(Nonlinearity, PowerTerm) {
  CVec u(3);
  u << cplx(0.0), cplx(2.0), cplx(0.0, -1.0);
  const CVec n = power_nonlinearity(u, {0.5, 3.0});
  EXPECT_EQ(n[0], cplx(0.0));
  EXPECT_NEAR(std::abs(n[1] - cplx(4.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(n[2] - cplx(0.0, -0.5)), 0.0, 1e-15);
}
