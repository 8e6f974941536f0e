#include <gtest/gtest.h>

#include "nlsv/spectral/kato.hpp"
#include "nlsv/spectral/littlewood_paley.hpp"

using namespace nlsv;

namespace {

const SpatialGrid kGrid(40.0, 1024);

double rel(const CVec& a, const CVec& ref) { return (a - ref).norm() / ref.norm(); }

CVec gaussian(const SpatialGrid& g) {
  return sample(g, [](double x) { return cplx(std::exp(-0.5 * x * x)); });
}

const DistortedBasis& barrier_basis() {
  static const DistortedBasis b = build_distorted_basis(sample_potential(potentials::GaussianBarrier{1, 1}, kGrid));
  return b;
}

const DistortedBasis& free_basis() {
  static const DistortedBasis b = build_distorted_basis(sample_potential(potentials::Zero{}, kGrid));
  return b;
}

}  // namespace

TEST(Basis, FreeBasisIsTheFourierTransform) {
  for (const CVec& f : schwartz_battery(kGrid, 5))
    EXPECT_LT(rel(distorted_forward(free_basis(), f), fourier_forward(kGrid, f)), 1e-13);
}

TEST(Basis, BarrierCertified) {
  const BasisReport& r = barrier_basis().report;
  EXPECT_TRUE(r.certified);
  EXPECT_LT(r.plancherel_defect, 1e-6);
  EXPECT_EQ(r.bound_states, 0);
  EXPECT_LT(std::abs(r.T0), 1e-3);  // generic: T(0) = 0
}

TEST(Basis, BoundStateRejected) {
  EXPECT_THROW(build_distorted_basis(sample_potential(potentials::SolitonWell{1.0}, kGrid)), BasisCertificationError);
}

TEST(Basis, SquareOfTheHamiltonianMatchesDirectFormula) {
  // -Δ_V f = -f'' + V f = (1 - x² + V) e^{-x²/2}
  const CVec f = gaussian(kGrid);
  const CVec ref = sample(kGrid, [](double x) { return cplx((1.0 - x * x + std::exp(-0.5 * x * x)) * std::exp(-0.5 * x * x)); });
  EXPECT_LT(rel(fractional_power(barrier_basis(), 2.0, f, Spectrum::potential), ref), 1e-5);
  EXPECT_LT(rel(fractional_power(barrier_basis(), 2.0, f, Spectrum::free),
                sample(kGrid, [](double x) { return cplx((1.0 - x * x) * std::exp(-0.5 * x * x)); })),
            1e-11);
}

TEST(Basis, KernelRouteAgreesWithBasisRoute) {
  const CVec f = schwartz_battery(kGrid, 3)[2];
  auto g = [](double lam) { return std::exp(-0.5 * lam); };
  const CVec a = apply_multiplier(barrier_basis(), g, f, Spectrum::potential);
  const CVec b = apply_multiplier_kernel(barrier_basis().potential, g, f);
  EXPECT_LT(rel(b, a), 1e-6);
}

TEST(Basis, MultiplierIsMultiplicative) {
  const CVec f = schwartz_battery(kGrid, 4)[3];
  auto g1 = [](double lam) { return 1.0 / (2.0 + lam); };
  auto g2 = [](double lam) { return std::exp(-0.25 * lam); };
  const CVec both = apply_multiplier(barrier_basis(), [&](double l) { return g1(l) * g2(l); }, f, Spectrum::potential);
  const CVec twice =
      apply_multiplier(barrier_basis(), g1, apply_multiplier(barrier_basis(), g2, f, Spectrum::potential), Spectrum::potential);
  // exact up to the round-trip defect of the truncated basis, which is
  // aliasing from the box edges and does not shrink with N
  const double roundtrip = barrier_basis().report.roundtrip_defect;
  EXPECT_LT(roundtrip, 1e-5);
  EXPECT_LT(rel(twice, both), roundtrip);
}

TEST(Kato, ConstantHasClosedForm) {
  // ∫_0^∞ τ^{a-1}/(1+τ) dτ = π / sin(πa)
  for (double s : {0.2, 0.6, 1.0, 1.7}) EXPECT_NEAR(kato_constant(s), std::sin(kPi * s / 2.0) / kPi, 1e-12) << s;
}

TEST(Kato, AgreesWithMultiplier) {
  const CVec f = gaussian(kGrid);
  for (double s : {0.4, 1.2})
    EXPECT_LT(rel(kato_fractional(barrier_basis().potential, s, f), fractional_power(barrier_basis(), s, f, Spectrum::potential)),
              1e-3);
}

TEST(Resolvent, FreeResolventMatchesFourierSymbol) {
  const Potential v = sample_potential(potentials::Zero{}, kGrid);
  const CVec f = gaussian(kGrid);
  for (double tau : {0.5, 4.0}) {
    const CVec ref = apply_free_symbol(kGrid, f, [tau](double xi) { return cplx(1.0 / (tau + xi * xi)); });
    EXPECT_LT(rel(resolvent_apply(v, tau, f), ref), 1e-6) << tau;
  }
}

TEST(Resolvent, IdentityAndResidual) {
  const Potential& v = barrier_basis().potential;
  const CVec f = schwartz_battery(kGrid, 2)[1];
  const Resolvent a(v, 0.3), b(v, 2.0);
  EXPECT_LT(rel(a.solve(f) - b.solve(f), CVec((2.0 - 0.3) * a.solve(b.solve(f)))), 1e-10);
  EXPECT_LT(resolvent_residual(v, 0.3, a.solve(f), f), 1e-10);
}

TEST(Resolvent, BoundConstantsFinite) {
  const Potential& v = barrier_basis().potential;
  const CVec f = gaussian(kGrid);
  for (double tau : {0.01, 1.0, 100.0}) {
    EXPECT_TRUE(std::isfinite(green_bound_constant(v, tau, f)));
    EXPECT_LT(sandwich_bound_constant(v, tau, f), 10.0);
  }
}

TEST(LittlewoodPaley, PartitionOfUnity) {
  const LPWindow w = lp_window(kGrid, 8);
  EXPECT_LT(partition_residual(w, kGrid), 1e-14);
  EXPECT_LE(std::ldexp(1.0, w.j_max + 1), kGrid.max_frequency());
  const DyadicEnergies e = lp_analysis(barrier_basis(), w, gaussian(kGrid), Spectrum::potential);
  EXPECT_LT(e.partition_defect, 1e-6);
}

TEST(LittlewoodPaley, BandFieldSupportCondition) {
  const LPWindow w = lp_window(kGrid, 8);
  EXPECT_NO_THROW(quasidiag_check(free_basis(), w.j_min + 1, w.j_min + 1, band_limited_field(kGrid, w.j_min + 1)));
  EXPECT_THROW(quasidiag_check(free_basis(), 0, 0, gaussian(kGrid)), SupportConditionError);
}

TEST(LittlewoodPaley, FreePairingsAreQuasidiagonal) {
  // with V = 0, φ_j φ_k vanishes unless |j-k| <= 1
  const QuasidiagSweep s = quasidiag_sweep(free_basis(), lp_window(kGrid, 8), 4);
  EXPECT_TRUE(s.nongrowing);
  for (const auto& [d, m] : s.envelope)
    if (d >= 2) EXPECT_LT(m, 1e-14) << d;
}

TEST(NormEquivalence, FreeRatioIsOne) {
  for (const CVec& f : schwartz_battery(kGrid, 4)) EXPECT_NEAR(norm_equiv_ratio(free_basis(), 0.3, f).ratio, 1.0, 1e-12);
}

TEST(NormEquivalence, BarrierRatiosBounded) {
  for (const CVec& f : schwartz_battery(kGrid, 10)) {
    const double r = norm_equiv_ratio(barrier_basis(), 0.25, f).ratio;
    EXPECT_GT(r, 0.5);
    EXPECT_LT(r, 2.0);
  }
}
