#include <gtest/gtest.h>

#include "nlsv/dynamics/decay.hpp"

using namespace nlsv;

namespace {

const SpatialGrid kGrid(40.0, 512);

const DistortedBasis& barrier_basis() {
  static const DistortedBasis b = [] {
    BasisOptions o;
    o.unitarize = true;
    return build_distorted_basis(sample_potential(potentials::GaussianBarrier{1, 1}, kGrid), o);
  }();
  return b;
}

CVec bump() {
  return sample(kGrid, [](double x) { return cplx(0.8 * std::exp(-0.5 * x * x)); });
}

CVec split_step(double h, double t_end) {
  CVec u = bump();
  const NonlinearTerm nl{1.0, 5.0};
  for (int n = 0; n < static_cast<int>(std::lround(t_end / h)); ++n) u = strang_step(barrier_basis(), nl, h, u);
  return u;
}

}  // namespace

TEST(Linear, PropagatorIsAGroup) {
  const CVec u = bump();
  const CVec a = evolve_linear(barrier_basis(), 0.0, 0.7, evolve_linear(barrier_basis(), 0.0, 0.5, u));
  EXPECT_LT((a - evolve_linear(barrier_basis(), 0.0, 1.2, u)).norm() / u.norm(), 1e-12);
  EXPECT_NEAR(l2_norm(kGrid, a), l2_norm(kGrid, u), 1e-12);
}

TEST(Strang, SecondOrder) {
  // errors against a fine reference shrink by 4 when h halves
  const CVec ref = split_step(0.0025, 0.4);
  const double e1 = l2_norm(kGrid, CVec(split_step(0.04, 0.4) - ref));
  const double e2 = l2_norm(kGrid, CVec(split_step(0.02, 0.4) - ref));
  EXPECT_NEAR(e1 / e2, 4.0, 0.4);
}

TEST(Strang, ConservesCharge) {
  const CVec u = bump();
  EXPECT_NEAR(l2_norm(kGrid, split_step(0.05, 1.0)) / l2_norm(kGrid, u), 1.0, 1e-12);
}

TEST(Decay, ExponentOfSyntheticSamples) {
  std::vector<DecaySample> samples;
  for (double t = 1.0; t <= 100.0; t *= 1.1) samples.push_back({t, 2.0 / std::sqrt(t), 1.0, 1.0});
  const DecayRecord r = decay_report(samples, 0.6);
  EXPECT_NEAR(r.alpha, 0.5, 1e-12);
  EXPECT_NEAR(r.sup_sqrt_t, 2.0, 1e-12);
  EXPECT_TRUE(r.last_decade_nonincreasing);
}

TEST(Decay, NeedsADecade) {
  std::vector<DecaySample> samples{{1.0, 1.0, 1.0, 1.0}, {5.0, 0.5, 1.0, 1.0}};
  EXPECT_THROW(decay_report(samples, 0.6), InsufficientSpanError);
}

TEST(Scattering, FreeWaveHasConstantProfile) {
  const CVec u0 = sample(kGrid, [](double x) { return cplx(std::exp(-0.5 * x * x)); });
  Trajectory snaps;
  for (double t : {1.0, 10.0, 60.0}) snaps.push_back({free_propagator(kGrid, t, u0), t});
  const ScatteringState s = extract_scattering_state(kGrid, snaps);
  for (double d : s.cauchy) EXPECT_LT(d, 1e-12);
  snaps.pop_back();
  EXPECT_THROW(extract_scattering_state(kGrid, snaps), ScatteringNotReached);
}

TEST(Profile, SigmaNormIsEpsilon) {
  ExperimentConfig c;
  c.eps = 0.05;
  EXPECT_NEAR(sigma_norm(kGrid, initial_profile(kGrid, c), c.s), 0.05, 1e-14);
}

TEST(Config, ValidationRejectsSubcriticalPower) {
  ExperimentConfig c;
  c.p = 3.0;
  EXPECT_THROW(c.validate(), PreconditionError);
}

TEST(Evolution, ShortRunConservesChargeAndRecords) {
  ExperimentConfig c;
  c.t_end = 2.0;
  c.checkpoints = {1.0, 2.0};
  c.edge_filter_width = 5.0;
  const CVec u0 = initial_profile(kGrid, c);
  int seen = 0;
  const NLSRun run = evolve_nls(barrier_basis(), c, u0, [&](double, const CVec&) { ++seen; });
  EXPECT_EQ(run.step_count, 100);
  EXPECT_EQ(seen, static_cast<int>(run.steps.size()));
  EXPECT_EQ(run.snapshots.size(), 2u);
  EXPECT_LT(conservation_check(run.steps).max_relative_drift, 1e-6);
}
