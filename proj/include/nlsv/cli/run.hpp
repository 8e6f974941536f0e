#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>

#include "nlsv/cli/checks.hpp"

namespace nlsv::cli {

using checks::Measurement;

/// State shared by one subcommand invocation: the config (which records
/// every value read, defaults included), produced files, checks and timings.
class RunContext {
 public:
  RunContext(Config config, std::string out_dir, int resolution_scale = 1)
      : config_(std::move(config)), out_(std::move(out_dir)), scale_(resolution_scale) {
    require(scale_ >= 1, "resolution scale must be a positive integer");
  }

  const Config& config() const { return config_; }
  int scale() const { return scale_; }

  /// Grid from `<prefix>.L` / `<prefix>.N`, with N multiplied by the scale.
  SpatialGrid grid(const std::string& prefix, double L, int N) const {
    const SpatialGrid g = read_grid(config_, prefix, L, N);
    return SpatialGrid(g.half_width(), g.size() * scale_);
  }
  /// A time step, divided by the scale.
  double step(const std::string& key, double fallback) const { return config_.get(key, fallback) / scale_; }

  /// Potential under `prefix`; an absent entry takes `fallback` with its parameters.
  PotentialDescriptor potential(const std::string& prefix, const PotentialDescriptor& fallback) {
    if (!config_.has(prefix)) {
      Config defaults;
      write_potential(defaults, fallback, prefix);
      for (const auto& [k, v] : defaults.raw())
        if (!config_.has(k)) config_.set(k, v);
    }
    return read_potential(config_, prefix);
  }

  void save(const std::string& name, const CsvTable& table) {
    std::filesystem::create_directories(out_);
    const std::string path = (std::filesystem::path(out_) / name).string();
    table.save(path);
    outputs_.push_back(path);
  }

  void check(Measurement m) { checks_.push_back(std::move(m)); }
  void info(const std::string& key, const std::string& value) { info_[key] = value; }

  /// Runs `fn` and records its wall-clock time under `label`.
  template <class Fn>
  auto timed(const std::string& label, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    auto finish = [&] { timings_.emplace_back(label, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()); };
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      finish();
    } else {
      auto r = fn();
      finish();
      return r;
    }
  }

  const std::vector<Measurement>& checks() const { return checks_; }
  const std::vector<std::string>& outputs() const { return outputs_; }
  const std::vector<std::pair<std::string, double>>& timings() const { return timings_; }
  const std::map<std::string, std::string>& infos() const { return info_; }
  bool all_pass() const {
    return std::all_of(checks_.begin(), checks_.end(), [](const Measurement& m) { return m.pass; });
  }

 private:
  Config config_;
  std::string out_;
  int scale_;
  std::vector<Measurement> checks_;
  std::vector<std::string> outputs_;
  std::vector<std::pair<std::string, double>> timings_;
  std::map<std::string, std::string> info_;
};

/// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string fnv1a_digest(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string check_line(const Measurement& m) {
  std::string line = std::string(m.pass ? "PASS " : "FAIL ") + m.name + "  value=" + checks::fmt(m.value) +
                     "  limit=" + checks::fmt(m.limit);
  if (!m.detail.empty()) line += "  (" + m.detail + ")";
  return line;
}

inline const potentials::GaussianBarrier kBarrier{1.0, 1.0};

// -------------------------------------------------------------------- scatter

inline void run_scatter(RunContext& ctx) {
  const Config& c = ctx.config();
  const PotentialDescriptor d = ctx.potential("potential", kBarrier);
  const Potential v = sample_potential(d, ctx.grid("grid", 40.0, 2048));
  const auto taus = default_tau_grid(c.get("scatter.tau_max", 20.0), c.get("scatter.tau_step", 0.05));
  const auto u = ctx.timed("scattering_data", [&] { return checks::unitarity(v, taus, c.get("scatter.unitarity_limit", 1e-7)); });

  CsvTable table({"tau", "re_T", "im_T", "re_R_plus", "im_R_plus", "re_R_minus", "im_R_minus", "unitarity_defect"});
  for (std::size_t k = 0; k < u.data.size(); ++k) {
    const double defect = std::max(std::abs(std::norm(u.data.T[k]) + std::norm(u.data.R_plus[k]) - 1.0),
                                   std::abs(std::norm(u.data.T[k]) + std::norm(u.data.R_minus[k]) - 1.0));
    table.add({taus[k], u.data.T[k].real(), u.data.T[k].imag(), u.data.R_plus[k].real(), u.data.R_plus[k].imag(),
               u.data.R_minus[k].real(), u.data.R_minus[k].imag(), defect});
  }
  ctx.save("scattering.csv", table);
  ctx.check(u.check);

  const SanityReport sanity = scattering_sanity(u.data);
  ctx.check({"scattering_sanity", sanity.transmission_decay, 1e6, sanity.finite,
             sanity.reflectionless ? "reflectionless" : "reflecting"});
  try {
    const Classification cls = classify_potential(u.data);
    ctx.info("classification", to_string(cls.kind));
    ctx.info("T0", Config::format(cls.T0.real()) + (cls.T0.imag() < 0 ? "" : "+") + Config::format(cls.T0.imag()) + "i");
    if (is_zero(d))
      ctx.check({"free_classification", 0.0, 0.0, cls.kind == Genericity::transparent, to_string(cls.kind)});
    else
      ctx.check({"classification", std::abs(cls.T0 - cls.T0_low_order), kGenericityTolerance, true, to_string(cls.kind)});
  } catch (const ClassificationError& e) {
    ctx.check({"classification", INFINITY, kGenericityTolerance, false, e.what()});
  }
  if (is_zero(d)) {
    double worst = 0.0;
    for (cplx t : u.data.T) worst = std::max(worst, std::abs(t - 1.0));
    ctx.check(checks::below("free_transmission", worst, 1e-8));
  }
  if (auto sq = std::get_if<potentials::SquareBarrier>(&d))
    ctx.check(ctx.timed("transfer_matrix", [&] { return checks::square_barrier_oracle(v.grid, *sq); }));
}

// ------------------------------------------------------------- spectral-check

inline void run_spectral_check(RunContext& ctx) {
  const Config& c = ctx.config();
  const PotentialDescriptor d = ctx.potential("potential", kBarrier);
  const SpatialGrid g = ctx.grid("grid", 40.0, 2048);
  const Potential v = sample_potential(d, g);
  const DistortedBasis b = ctx.timed("basis", [&] { return build_distorted_basis(v); });
  ctx.info("basis.plancherel_defect", Config::format(b.report.plancherel_defect));
  ctx.info("basis.roundtrip_defect", Config::format(b.report.roundtrip_defect));
  ctx.check(checks::plancherel(b, c.get("spectral.battery", 10)));

  // homomorphism and resolvent identity on the battery
  double hom = 0.0, res = 0.0;
  const double tau1 = 0.7, tau2 = 3.0;
  const Resolvent r1(v, tau1), r2(v, tau2);
  for (const CVec& f : schwartz_battery(g, c.get("spectral.battery", 10))) {
    auto g1 = [](double lam) { return std::exp(-lam); };
    auto g2 = [](double lam) { return 1.0 / (1.0 + lam); };
    const CVec both = apply_multiplier(b, [&](double lam) { return g1(lam) * g2(lam); }, f, Spectrum::potential);
    const CVec composed = apply_multiplier(b, g1, apply_multiplier(b, g2, f, Spectrum::potential), Spectrum::potential);
    hom = std::max(hom, checks::relative_l2(g, composed, both));
    const CVec lhs = r1.solve(f) - r2.solve(f);
    const CVec rhs = (tau2 - tau1) * r1.solve(r2.solve(f));
    res = std::max(res, checks::relative_l2(g, lhs, rhs));
  }
  ctx.check(checks::below("multiplier_homomorphism", hom, 1e-6));
  ctx.check(checks::below("resolvent_identity", res, 1e-8));

  CsvTable kato({"s", "relative_difference"});
  ctx.check(ctx.timed("kato", [&] {
    return checks::kato_vs_multiplier(b, c.get_list("spectral.powers", {0.3, 0.5, 1.0, 1.5}), &kato);
  }));
  ctx.save("kato_vs_multiplier.csv", kato);

  const auto rc = ctx.timed("resolvent_bounds", [&] {
    return checks::resolvent_constants(d, g, c.get("resolvent.taus_per_decade", 2));
  });
  CsvTable rt({"tau", "green", "green_refined", "sandwich", "sandwich_refined"});
  for (std::size_t q = 0; q < rc.taus.size(); ++q)
    rt.add({rc.taus[q], rc.green[q], rc.green_fine[q], rc.sandwich[q], rc.sandwich_fine[q]});
  ctx.save("resolvent_constants.csv", rt);
  ctx.check(rc.green_check);
  ctx.check(rc.sandwich_check);
}

// ----------------------------------------------------------------- norm-equiv

inline void quasidiag_part(RunContext& ctx, const DistortedBasis& b, const std::string& tag) {
  const Config& c = ctx.config();
  const auto q = ctx.timed("quasidiag_" + tag, [&] {
    return checks::quasidiagonality(b, c.get("quasidiag.min_modes", 4), c.get("quasidiag.max_separation", 8),
                                    c.get("quasidiag.bound", 2.0));
  });
  CsvTable t({"j", "k", "pairing", "bound", "ratio"});
  for (const auto& e : q.sweep.entries) t.add({double(e.j), double(e.k), e.pairing, e.bound, e.ratio});
  ctx.save("quasidiag_" + tag + ".csv", t);
  ctx.check(q.check);
}

inline void run_norm_equiv(RunContext& ctx) {
  const Config& c = ctx.config();
  const PotentialDescriptor generic = ctx.potential("potential", kBarrier);
  const PotentialDescriptor transparent = ctx.potential("transparent", potentials::ZeroResonance{0.3});
  const SpatialGrid g = ctx.grid("grid", 40.0, 2048);
  const DistortedBasis b = ctx.timed("basis", [&] { return build_distorted_basis(sample_potential(generic, g)); });
  const DistortedBasis fine = ctx.timed("basis_refined", [&] { return build_distorted_basis(sample_potential(generic, g.refined(2))); });

  const auto powers = c.get_list("norm.powers", {0.1, 0.25, 0.4});
  const int battery = c.get("norm.battery", 20);
  const double band = c.get("norm.band", 2.0);
  CsvTable ratios({"s", "function", "free", "potential", "ratio"});
  double worst = 1.0;
  for (double s : powers) {
    const auto fs = schwartz_battery(g, battery);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const NormRatio r = norm_equiv_ratio(b, s, fs[i]);
      ratios.add({s, double(i), r.free, r.potential, r.ratio});
      worst = std::max({worst, r.ratio, 1.0 / r.ratio});
    }
  }
  ctx.save("norm_ratios.csv", ratios);
  ctx.check({"norm_band", worst, band, worst <= band, "all ratios within [1/C, C]"});
  CsvTable stab({"s", "lo", "hi", "C", "C_refined", "relative_change"});
  ctx.check(ctx.timed("norm_refinement", [&] { return checks::norm_equivalence(b, fine, powers, battery, &stab); }));
  ctx.save("norm_constants.csv", stab);

  // the refined grid is fine enough to resolve the whole |k-j| sweep
  quasidiag_part(ctx, fine, "generic");
  const DistortedBasis tb = ctx.timed("basis_transparent", [&] {
    return build_distorted_basis(sample_potential(transparent, g.refined(2)));
  });
  quasidiag_part(ctx, tb, "transparent");
}

// ----------------------------------------------------------- commutator-check

inline void run_commutator_check(RunContext& ctx) {
  const Config& c = ctx.config();
  const PotentialDescriptor d = ctx.potential("potential", kBarrier);
  BasisOptions opt;
  opt.with_derivative = true;

  // A(s): the box must be wide, since A(s)f has algebraic tails
  const SpatialGrid g = ctx.grid("grid", 120.0, 2048);
  const DistortedBasis b = ctx.timed("basis", [&] { return build_distorted_basis(sample_potential(d, g), opt); });
  const DistortedBasis fine = ctx.timed("basis_refined", [&] { return build_distorted_basis(sample_potential(d, g.refined(2)), opt); });
  const auto powers = c.get_list("A.powers", {0.5, 0.6, 1.0});
  CsvTable routes({"s", "relative_difference"});
  ctx.check(ctx.timed("A_routes", [&] { return checks::a_route_agreement(b, powers, &routes); }));
  ctx.save("A_routes.csv", routes);
  CsvTable bound({"s", "C", "C_refined", "relative_change"});
  ctx.check(ctx.timed("A_bound", [&] { return checks::a_bound_stability(b, fine, powers, &bound); }));
  ctx.save("A_bound.csv", bound);

  // residual on linear trajectories e^{itΔ_V} u0
  const SpatialGrid rg = ctx.grid("residual.grid", 40.0, 2048);
  const double tc = c.get("residual.t", 2.0);
  const double free_dt = ctx.step("residual.free_dt", 0.0125), dt = ctx.step("residual.dt", 0.05);
  CsvTable rt({"case", "s", "dt", "relative_residual"});
  ctx.timed("residual_free", [&] {
    const DistortedBasis zb = build_distorted_basis(sample_potential(potentials::Zero{}, rg), opt);
    // centred off the origin: |x| u0 is then smooth, and so is |J| u(t)
    const double r = checks::linear_residual(zb, 1.0, checks::centered_gaussian(rg, c.get("residual.free_center", 6.0)), tc, free_dt);
    rt.add({0.0, 1.0, free_dt, r});
    ctx.check(checks::below("free_residual", r, c.get("residual.free_limit", 1e-5)));
  });
  ctx.timed("residual_potential", [&] {
    const DistortedBasis pb = build_distorted_basis(sample_potential(d, rg), opt);
    const double s = c.get("residual.s", 0.6);
    const CVec u0 = checks::centered_gaussian(rg);
    const Measurement m = checks::residual_convergence(pb, s, u0, tc, dt);
    rt.add({1.0, s, dt, checks::linear_residual(pb, s, u0, tc, dt)});
    rt.add({1.0, s, 0.25 * dt, checks::linear_residual(pb, s, u0, tc, 0.25 * dt)});
    ctx.check(m);
  });
  ctx.save("residuals.csv", rt);
}

// ---------------------------------------------------------------------- decay

inline ExperimentConfig experiment_config(const RunContext& ctx) {
  const Config& c = ctx.config();
  ExperimentConfig e;
  e.p = c.get("decay.p", e.p);
  e.eps = c.get("decay.eps", e.eps);
  e.s = c.get("decay.s", e.s);
  e.t_end = c.get("decay.t_end", e.t_end);
  e.dt = ctx.step("decay.dt", e.dt);
  e.t_fine = c.get("decay.t_fine", e.t_fine);
  e.phase_cap = c.get("decay.phase_cap", e.phase_cap);
  e.dt_max = ctx.step("decay.dt_max", e.dt_max);
  e.focus_width = c.get("decay.focus_width", e.focus_width);
  e.focus_time = c.get("decay.focus_time", e.focus_time);
  e.profile_center = c.get("decay.profile_center", e.profile_center);
  e.edge_width = c.get("decay.edge_width", e.edge_width);
  e.edge_tolerance = c.get("decay.edge_tolerance", e.edge_tolerance);
  e.edge_filter_width = c.get("decay.edge_filter_width", e.edge_filter_width);
  e.spectral_cutoff = c.get("decay.spectral_cutoff", e.spectral_cutoff);
  e.record_every = c.get("decay.record_every", 10);
  e.checkpoints = c.get_list("decay.checkpoints", e.checkpoints);
  return e;
}

inline void run_decay(RunContext& ctx) {
  const Config& c = ctx.config();
  const PotentialDescriptor d = ctx.potential("potential", kBarrier);
  const SpatialGrid g = ctx.grid("grid", 2400.0, 9216);
  const ExperimentConfig base = experiment_config(ctx);
  const auto lambdas = c.get_list("decay.lambdas", {1.0, -1.0});
  const DistortedBasis b = ctx.timed("basis", [&] { return build_distorted_basis(sample_potential(d, g)); });
  // one trajectory at a time; the workers share its matrix products
  for (double lambda : lambdas) {
    ExperimentConfig e = base;
    e.lambda = lambda;
    char name[32];
    std::snprintf(name, sizeof name, "lambda_%g", lambda);
    const std::string tag = std::string("[") + name + "]";
    try {
      const DecayExperiment x = ctx.timed(std::string("nls_") + name, [&] { return run_decay_experiment(b, e); });
      CsvTable t({"t", "sup", "l2", "jv", "sqrt_t_sup", "interpolation_ratio"});
      for (const DecaySample& s : x.record.samples)
        t.add({s.t, s.sup, s.l2, s.jv, std::sqrt(s.t) * s.sup, interpolation_ratio(s, e.s)});
      ctx.save(std::string("decay_") + name + ".csv", t);
      CsvTable cauchy({"t_k", "t_k1", "d_k"});
      for (std::size_t k = 0; k < x.scattering.cauchy.size(); ++k)
        cauchy.add({x.scattering.times[k], x.scattering.times[k + 1], x.scattering.cauchy[k]});
      ctx.save(std::string("cauchy_") + name + ".csv", cauchy);
      ctx.info(std::string(name) + ".steps", std::to_string(x.run.step_count));
      ctx.info(std::string(name) + ".alpha", Config::format(x.record.alpha));
      ctx.info(std::string(name) + ".interpolation_constant", Config::format(x.record.interpolation_constant));
      for (Measurement& m : checks::judge_decay(x, tag)) ctx.check(std::move(m));
    } catch (const ExperimentAborted& err) {
      ctx.check({"decay" + tag, INFINITY, 0.0, false, err.what()});
    }
  }
}

inline const std::map<std::string, std::function<void(RunContext&)>>& subcommands() {
  static const std::map<std::string, std::function<void(RunContext&)>> table{
      {"scatter", run_scatter},
      {"spectral-check", run_spectral_check},
      {"norm-equiv", run_norm_equiv},
      {"commutator-check", run_commutator_check},
      {"decay", run_decay},
  };
  return table;
}

}  // namespace nlsv::cli
