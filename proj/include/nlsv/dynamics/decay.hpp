#pragma once

#include <limits>

#include "nlsv/dynamics/evolution.hpp"

namespace nlsv {

struct DecaySample {
  double t = 0.0;
  double sup = 0.0;
  double l2 = 0.0;
  double jv = 0.0;  // || |J_V(t)|^s u ||_2
};

struct DecayRecord {
  double s = 0.0;
  std::vector<DecaySample> samples;
  double sup_sqrt_t = 0.0;          // sup_n √t_n ||u(t_n)||_∞
  double alpha = 0.0;               // fitted on [T/2, T]
  double interpolation_constant = 0.0;  // max over t of the interpolation ratio
  double jv_growth = 0.0;           // max_n ||J_V^s u(t_n)|| / ||J_V^s u(t_0)||
  bool last_decade_nonincreasing = false;  // √t||u||_∞ over [T/10, T]
};

class InsufficientSpanError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// ||u||_∞ √t / (||u||_2^{1-1/2s} || |J_V|^s u ||_2^{1/2s}).
inline double interpolation_ratio(const DecaySample& d, double s) {
  return d.sup * std::sqrt(d.t) / (std::pow(d.l2, 1.0 - 0.5 / s) * std::pow(d.jv, 0.5 / s));
}

inline DecayRecord decay_report(std::vector<DecaySample> samples, double s) {
  require(!samples.empty(), "no samples");
  const double t0 = samples.front().t, T = samples.back().t;
  if (T < 10.0 * t0) throw InsufficientSpanError("decay report needs at least one decade in t");
  DecayRecord r;
  r.s = s;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  double prev_tail = std::numeric_limits<double>::infinity();
  r.last_decade_nonincreasing = true;
  for (const DecaySample& d : samples) {
    const double st = std::sqrt(d.t) * d.sup;
    r.sup_sqrt_t = std::max(r.sup_sqrt_t, st);
    r.interpolation_constant = std::max(r.interpolation_constant, interpolation_ratio(d, s));
    r.jv_growth = std::max(r.jv_growth, d.jv / samples.front().jv);
    if (d.t >= T / 10.0 - 1e-12) {
      if (st > prev_tail * (1.0 + 1e-12)) r.last_decade_nonincreasing = false;
      prev_tail = st;
    }
    if (d.t >= 0.5 * T - 1e-12) {
      const double x = std::log(d.t), y = std::log(d.sup);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++m;
    }
  }
  r.alpha = m >= 2 ? -(m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
  r.samples = std::move(samples);
  return r;
}

inline DecaySample decay_sample(const DistortedBasis& b, double s, double t, const CVec& u) {
  return {t, sup_norm(u), l2_norm(b.grid(), u), l2_norm(b.grid(), weighted_J_power(b, s, t, u, Spectrum::potential))};
}

/// DecayRecord from stored snapshots.
inline DecayRecord decay_report(const DistortedBasis& b, const Trajectory& traj, double s) {
  std::vector<DecaySample> samples(traj.size());
  parallel_for(static_cast<int>(traj.size()), [&](int n) { samples[n] = decay_sample(b, s, traj[n].t, traj[n].values); });
  return decay_report(std::move(samples), s);
}

struct ScatteringState {
  CVec u_plus;                 // e^{-iTΔ} u(T)
  std::vector<double> times;   // checkpoint times
  std::vector<double> cauchy;  // d_k = ||v(t_{k+1}) - v(t_k)||
  bool decreasing = false;
};

class ScatteringNotReached : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// v(t) = e^{-itΔ} u(t) with the free group, compared across checkpoints.
inline ScatteringState extract_scattering_state(const SpatialGrid& g, const Trajectory& snapshots) {
  require(snapshots.size() >= 2, "need at least two checkpoints");
  if (snapshots.back().t < 50.0) throw ScatteringNotReached("scattering extraction needs t >= 50");
  ScatteringState out;
  std::vector<CVec> v(snapshots.size());
  parallel_for(static_cast<int>(snapshots.size()),
               [&](int k) { v[k] = free_propagator(g, -snapshots[k].t, snapshots[k].values); });
  for (std::size_t k = 0; k < snapshots.size(); ++k) out.times.push_back(snapshots[k].t);
  for (std::size_t k = 0; k + 1 < v.size(); ++k) out.cauchy.push_back(l2_norm(g, CVec(v[k + 1] - v[k])));
  out.decreasing = true;
  for (std::size_t k = 1; k < out.cauchy.size(); ++k)
    if (!(out.cauchy[k] < out.cauchy[k - 1])) out.decreasing = false;
  out.u_plus = v.back();
  return out;
}

/// NLS run plus per-record decay diagnostics and the scattering state.
struct DecayExperiment {
  NLSRun run;
  DecayRecord record;
  ScatteringState scattering;
  DriftReport drift;
};

inline DecayExperiment run_decay_experiment(const DistortedBasis& b, const ExperimentConfig& c) {
  const CVec u0 = initial_profile(b.grid(), c);
  DecayExperiment e;
  std::vector<DecaySample> samples;
  e.run = evolve_nls(b, c, u0, [&](double t, const CVec& u) { samples.push_back(decay_sample(b, c.s, t, u)); });
  e.record = decay_report(std::move(samples), c.s);
  e.scattering = extract_scattering_state(b.grid(), e.run.snapshots);
  e.drift = conservation_check(e.run.steps);
  return e;
}

}  // namespace nlsv
