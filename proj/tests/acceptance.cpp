// Acceptance run: every criterion at its stated tolerance and time budget.
// One PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <thread>

#include "nlsv/cli/run.hpp"

using namespace nlsv;
using checks::Measurement;

namespace {

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<std::vector<Measurement>()> run;
};

bool report(const Criterion& c) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<Measurement> ms;
  std::string error;
  try {
    ms = c.run();
  } catch (const std::exception& e) {
    error = e.what();
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool pass = error.empty() && seconds <= c.budget_seconds;
  for (const Measurement& m : ms) pass = pass && m.pass;
  std::printf("%s %2d %-28s time=%.1fs budget=%.0fs\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), seconds,
              c.budget_seconds);
  for (const Measurement& m : ms) std::printf("       %s\n", cli::check_line(m).c_str());
  if (!error.empty()) std::printf("       error: %s\n", error.c_str());
  std::fflush(stdout);
  return pass;
}

const potentials::GaussianBarrier kBarrier{1.0, 1.0};
const SpatialGrid kGrid(40.0, 2048);

std::vector<Criterion> criteria() {
  std::vector<Criterion> out;

  out.push_back({1, "scattering_unitarity", 10.0, [] {
                   const auto taus = default_tau_grid();
                   std::vector<Measurement> ms;
                   for (const PotentialDescriptor& d : {PotentialDescriptor(kBarrier), PotentialDescriptor(potentials::SolitonWell{1.0})}) {
                     ms.push_back(checks::unitarity(sample_potential(d, kGrid), taus).check);
                   }
                   return ms;
                 }});

  out.push_back({2, "free_reduction", 10.0, [] { return std::vector{checks::free_reduction(kGrid)}; }});

  out.push_back({3, "square_barrier_oracle", 5.0, [] {
                   return std::vector{checks::square_barrier_oracle(kGrid, potentials::SquareBarrier{4.0, 1.0})};
                 }});

  out.push_back({4, "distorted_plancherel", 30.0, [] {
                   BasisOptions o;
                   o.certify = false;  // the measurement below is the verdict
                   const DistortedBasis b = build_distorted_basis(sample_potential(kBarrier, kGrid), o);
                   return std::vector{checks::plancherel(b, 10)};
                 }});

  out.push_back({5, "fractional_power_routes", 60.0, [] {
                   const DistortedBasis b = build_distorted_basis(sample_potential(kBarrier, kGrid));
                   return std::vector{checks::kato_vs_multiplier(b, {0.3, 0.5, 1.0, 1.5}, nullptr)};
                 }});

  out.push_back({6, "A_routes_and_bound", 60.0, [] {
                   BasisOptions o;
                   o.with_derivative = true;
                   const SpatialGrid g(120.0, 2048);
                   const DistortedBasis b = build_distorted_basis(sample_potential(kBarrier, g), o);
                   const DistortedBasis fine = build_distorted_basis(sample_potential(kBarrier, g.refined(2)), o);
                   const std::vector<double> powers{0.5, 0.6, 1.0};
                   return std::vector{checks::a_route_agreement(b, powers, nullptr),
                                      checks::a_bound_stability(b, fine, powers, nullptr)};
                 }});

  out.push_back({7, "commutator_residual", 120.0, [] {
                   BasisOptions o;
                   o.with_derivative = true;
                   const DistortedBasis zb = build_distorted_basis(sample_potential(potentials::Zero{}, kGrid), o);
                   const CVec off = checks::centered_gaussian(kGrid, 6.0);
                   Measurement conv_free = checks::residual_convergence(zb, 1.0, off, 2.0, 0.05);
                   const Measurement level = checks::below("free_residual", checks::linear_residual(zb, 1.0, off, 2.0, 0.0125), 1e-5);
                   const DistortedBasis pb = build_distorted_basis(sample_potential(kBarrier, kGrid), o);
                   const Measurement conv = checks::residual_convergence(pb, 0.6, checks::centered_gaussian(kGrid), 2.0, 0.05);
                   return std::vector{conv_free, level, conv};
                 }});

  out.push_back({8, "quasi_diagonality", 120.0, [] {
                   const SpatialGrid g = kGrid.refined(2);
                   std::vector<Measurement> ms;
                   for (const PotentialDescriptor& d : {PotentialDescriptor(kBarrier), PotentialDescriptor(potentials::ZeroResonance{0.3})}) {
                     ms.push_back(checks::quasidiagonality(build_distorted_basis(sample_potential(d, g)), 4, 8, 2.0).check);
                   }
                   return ms;
                 }});

  out.push_back({9, "norm_equivalence", 60.0, [] {
                   const DistortedBasis b = build_distorted_basis(sample_potential(kBarrier, kGrid));
                   const DistortedBasis fine = build_distorted_basis(sample_potential(kBarrier, kGrid.refined(2)));
                   return std::vector{checks::norm_equivalence(b, fine, {0.1, 0.25, 0.4}, 20, nullptr)};
                 }});

  // the budget covers one trajectory; four workers shorten it to five minutes
  const double decay_budget = worker_count() >= 4 ? 300.0 : 900.0;
  for (double lambda : {1.0, -1.0}) {
    char name[32];
    std::snprintf(name, sizeof name, "decay[lambda_%g]", lambda);
    out.push_back({10, name, decay_budget, [lambda] {
                     const cli::RunContext ctx(Config(), "unused");
                     ExperimentConfig e = cli::experiment_config(ctx);
                     e.lambda = lambda;
                     const DistortedBasis b = build_distorted_basis(sample_potential(kBarrier, SpatialGrid(2400.0, 9216)));
                     try {
                       return checks::judge_decay(run_decay_experiment(b, e), "");
                     } catch (const ExperimentAborted& err) {
                       return std::vector{Measurement{"decay", INFINITY, 0.0, false, err.what()}};
                     }
                   }});
  }

  out.push_back({11, "resolvent_bound_shape", 60.0, [] {
                   const auto rc = checks::resolvent_constants(kBarrier, kGrid, 2);
                   return std::vector{rc.green_check, rc.sandwich_check};
                 }});
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  worker_count() = static_cast<int>(std::min(4u, std::max(1u, std::thread::hardware_concurrency())));
  std::printf("workers: %d\n", worker_count());
  // optional filter: run only the listed criterion ids
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  bool all = true;
  for (const Criterion& c : criteria())
    if (only.empty() || std::find(only.begin(), only.end(), c.id) != only.end()) all = report(c) && all;
  std::printf("%s\n", all ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL");
  return all ? 0 : 1;
}
