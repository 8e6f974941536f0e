#pragma once

#include <map>

#include "nlsv/spectral/basis.hpp"

namespace nlsv {

/// Dyadic partition built from a smooth step β (β = 1 on [0,1], 0 on [2,∞)):
/// φ(r) = β(r) - β(2r) lives on [1/2, 2] and Σ_j φ(2^{-j} r) telescopes to 1.
struct LPWindow {
  int j_min = 0;
  int j_max = 0;

  static double beta(double r) {
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    auto h = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
    const double u = 2.0 - r;
    return h(u) / (h(u) + h(1.0 - u));
  }
  static double phi(double r) { return beta(r) - beta(2.0 * r); }

  double piece(int j, double r) const { return phi(std::ldexp(r, -j)); }
  /// Everything below the first resolved band.
  double low(double r) const { return beta(std::ldexp(r, 1 - j_min)); }
  /// low + Σ_j pieces; equals 1 for r up to 2^{j_max}.
  double partition(double r) const {
    double s = low(r);
    for (int j = j_min; j <= j_max; ++j) s += piece(j, r);
    return s;
  }
  int count() const { return j_max - j_min + 1; }
};

/// Bands whose annulus [2^{j-1}, 2^{j+1}] holds at least `min_modes` lattice
/// frequencies and stays below the Nyquist frequency.
inline LPWindow lp_window(const SpatialGrid& g, int min_modes = 8) {
  LPWindow w;
  w.j_min = -30;
  while (1.5 * std::ldexp(1.0, w.j_min) / g.dxi() < min_modes) ++w.j_min;
  w.j_max = w.j_min;
  while (std::ldexp(1.0, w.j_max + 2) <= g.max_frequency()) ++w.j_max;
  require(w.j_max >= w.j_min, "grid resolves no dyadic band");
  return w;
}

/// Largest |1 - partition| over lattice frequencies with |ξ| <= 2^{j_max}.
inline double partition_residual(const LPWindow& w, const SpatialGrid& g) {
  double worst = 0.0;
  for (int k = 0; k < g.size(); ++k) {
    const double r = std::abs(g.xi(k));
    if (r <= std::ldexp(1.0, w.j_max)) worst = std::max(worst, std::abs(1.0 - w.partition(r)));
  }
  return worst;
}

/// |F f|² or |F_V f|² on the lattice.
inline RVec spectral_density(const DistortedBasis& b, const CVec& f, Spectrum which) {
  const CVec spec = which == Spectrum::free ? fourier_forward(b.grid(), f) : distorted_forward(b, f);
  return spec.cwiseAbs2();
}

struct DyadicEnergies {
  std::vector<int> j;
  std::vector<double> energy;   // <φ_j f, f>
  std::vector<double> squared;  // ||φ_j f||²
  double low = 0.0;             // <β(2^{1-j_min}·) f, f>
  double total = 0.0;           // ||f||²
  double partition_defect = 0.0;  // |low + Σ energy - total| / total

  /// Σ_j 2^{2js} e_j with the low remainder weighted at 2^{2(j_min-1)s}.
  double weighted_sum(double s) const {
    double acc = j.empty() ? 0.0 : std::pow(2.0, 2.0 * (j.front() - 1) * s) * low;
    for (std::size_t i = 0; i < j.size(); ++i) acc += std::pow(2.0, 2.0 * j[i] * s) * energy[i];
    return acc;
  }
};

inline DyadicEnergies lp_analysis(const DistortedBasis& b, const LPWindow& w, const CVec& f, Spectrum which) {
  const SpatialGrid& g = b.grid();
  const RVec dens = spectral_density(b, f, which);
  DyadicEnergies out;
  out.total = l2_norm(g, f) * l2_norm(g, f);
  for (int k = 0; k < g.size(); ++k) out.low += w.low(std::abs(g.xi(k))) * dens[k];
  out.low *= g.dxi();
  for (int j = w.j_min; j <= w.j_max; ++j) {
    double e = 0.0, sq = 0.0;
    for (int k = 0; k < g.size(); ++k) {
      const double p = w.piece(j, std::abs(g.xi(k)));
      e += p * dens[k];
      sq += p * p * dens[k];
    }
    out.j.push_back(j);
    out.energy.push_back(e * g.dxi());
    out.squared.push_back(sq * g.dxi());
  }
  double sum = out.low;
  for (double e : out.energy) sum += e;
  out.partition_defect = out.total > 0.0 ? std::abs(sum - out.total) / out.total : std::abs(sum);
  return out;
}

/// ||(-Δ)^{s/2} f||² or ||(-Δ_V)^{s/2} f||² from the spectral density.
inline double homogeneous_norm_squared(const DistortedBasis& b, const CVec& f, double s, Spectrum which) {
  const SpatialGrid& g = b.grid();
  const RVec dens = spectral_density(b, f, which);
  double acc = 0.0;
  for (int k = 0; k < g.size(); ++k) {
    const double r = std::abs(g.xi(k));
    acc += (s == 0.0 ? 1.0 : std::pow(r, 2.0 * s)) * dens[k];
  }
  return acc * g.dxi();
}

class SupportConditionError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Field with free spectrum φ(2^{-k}|ξ|), centred at the origin.
inline CVec band_limited_field(const SpatialGrid& g, int k) {
  CVec spec(g.size());
  for (int i = 0; i < g.size(); ++i) spec[i] = LPWindow::phi(std::ldexp(std::abs(g.xi(i)), -k));
  return fourier_inverse(g, spec);
}

struct QuasidiagEntry {
  int j = 0, k = 0;
  double pairing = 0.0;  // <φ(2^{-j}√(-Δ_V)) f_k, f_k>
  double bound = 0.0;    // 2^{-|k-j|} ||f_k||²
  double ratio = 0.0;
};

inline QuasidiagEntry quasidiag_check(const DistortedBasis& b, int j, int k, const CVec& fk,
                                      double leak_tolerance = 1e-10) {
  const SpatialGrid& g = b.grid();
  const RVec free_dens = spectral_density(b, fk, Spectrum::free);
  const double lo = std::ldexp(1.0, k - 1), hi = std::ldexp(1.0, k + 1);
  double outside = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const double r = std::abs(g.xi(i));
    if (r < lo * (1 - 1e-12) || r > hi * (1 + 1e-12)) outside += free_dens[i];
  }
  if (outside > leak_tolerance * free_dens.sum())
    throw SupportConditionError("field spectrum leaves the annulus around 2^" + std::to_string(k));
  const RVec dens = spectral_density(b, fk, Spectrum::potential);
  QuasidiagEntry e;
  e.j = j;
  e.k = k;
  for (int i = 0; i < g.size(); ++i) e.pairing += LPWindow::phi(std::ldexp(std::abs(g.xi(i)), -j)) * dens[i];
  e.pairing *= g.dxi();
  const double n = l2_norm(g, fk);
  e.bound = std::ldexp(n * n, -std::abs(k - j));
  e.ratio = e.pairing / e.bound;
  return e;
}

struct QuasidiagSweep {
  std::vector<QuasidiagEntry> entries;
  std::map<int, double> envelope;  // |k-j| -> max ratio
  double max_ratio = 0.0;
  int max_separation = 0;
  /// Ratios at separation d never exceed the largest ratio at smaller separations.
  bool nongrowing = true;
};

inline QuasidiagSweep quasidiag_sweep(const DistortedBasis& b, const LPWindow& w, int max_separation) {
  QuasidiagSweep out;
  std::vector<CVec> fields;
  for (int k = w.j_min; k <= w.j_max; ++k) fields.push_back(band_limited_field(b.grid(), k));
  for (int k = w.j_min; k <= w.j_max; ++k)
    for (int j = w.j_min; j <= w.j_max; ++j) {
      if (std::abs(k - j) > max_separation) continue;
      const QuasidiagEntry e = quasidiag_check(b, j, k, fields[k - w.j_min]);
      out.entries.push_back(e);
      const int d = std::abs(k - j);
      out.envelope[d] = std::max(out.envelope[d], e.ratio);
      out.max_ratio = std::max(out.max_ratio, e.ratio);
      out.max_separation = std::max(out.max_separation, d);
    }
  double running = 0.0;
  for (const auto& [d, m] : out.envelope) {
    if (d > 0 && m > running) out.nongrowing = false;
    running = std::max(running, m);
  }
  return out;
}

struct NormRatio {
  double free = 0.0;       // ||(-Δ)^{s/2} f||
  double potential = 0.0;  // ||(-Δ_V)^{s/2} f||
  double ratio = 1.0;      // potential / free
};

inline NormRatio norm_equiv_ratio(const DistortedBasis& b, double s, const CVec& f) {
  require(s >= 0.0, "norm equivalence needs s >= 0");
  NormRatio r;
  r.free = std::sqrt(homogeneous_norm_squared(b, f, s, Spectrum::free));
  r.potential = std::sqrt(homogeneous_norm_squared(b, f, s, Spectrum::potential));
  r.ratio = r.potential / r.free;
  return r;
}

}  // namespace nlsv
