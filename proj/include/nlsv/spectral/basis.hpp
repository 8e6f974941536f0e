#pragma once

#include <optional>

#include "nlsv/core/fourier.hpp"
#include "nlsv/core/parallel.hpp"
#include "nlsv/core/quadrature.hpp"
#include "nlsv/jost/scattering.hpp"
#include "nlsv/spectral/battery.hpp"

namespace nlsv {

class BasisCertificationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

enum class Spectrum { free, potential };

struct BasisOptions {
  JostOptions jost{};
  bool with_derivative = false;
  bool certify = true;
  double plancherel_tolerance = 1e-6;
  double unitarity_tolerance = 1e-6;
  int battery_size = 10;
  /// Replace the sampled basis by its nearest unitary (polar factor) after
  /// certification. Needed for long compositions such as split-step
  /// evolution, where the few badly conditioned edge directions of the
  /// truncated basis would otherwise grow from step to step. Costs one
  /// Hermitian eigendecomposition.
  bool unitarize = false;
};

struct BasisReport {
  double plancherel_defect = 0.0;
  double roundtrip_defect = 0.0;
  double unitarity_defect = 0.0;
  double sup_psi = 0.0;
  int bound_states = 0;
  cplx T0{1.0, 0.0};
  bool certified = false;
  bool unitarized = false;
  double sigma_min = 1.0, sigma_max = 1.0;  // singular values of the sampled basis, normalized
  int sigma_outliers = 0;                    // count with |σ - 1| > 1e-6
};

/// Generalized eigenfunctions on the dual lattice: column k holds Ψ(·, τ_k)
/// with τ_k = ξ_k. Ψ = T(τ) f_+(·,τ) for τ > 0 and T(-τ) f_-(·,-τ) for τ < 0.
struct DistortedBasis {
  Potential potential;
  CMat psi;
  CMat dpsi;  // ∂_x Ψ, only when requested
  std::vector<cplx> T;  // per column
  BasisReport report;

  const SpatialGrid& grid() const { return potential.grid; }
  double tau(int k) const { return grid().xi(k); }
  bool has_derivative() const { return dpsi.size() > 0; }
};

/// Extrapolated T(0) from the nodes δ, 2δ, 4δ.
inline Classification zero_momentum_classification(const Potential& v, const JostOptions& jost = {}) {
  ScatteringOptions opt;
  opt.jost = jost;
  return classify_potential(scattering_data(v, {kTauFloor, 2 * kTauFloor, 4 * kTauFloor}, opt));
}

/// Row blocks of the dense products are fixed independently of the worker
/// count, so results are bit-identical for any number of threads.
inline constexpr int kProductBlocks = 16;

inline CVec distorted_forward(const DistortedBasis& b, const CVec& f) {
  require(f.size() == b.grid().size(), "field does not match basis grid");
  const int n = b.grid().size(), len = (n + kProductBlocks - 1) / kProductBlocks;
  CVec out(n);
  parallel_for(kProductBlocks, [&](int q) {
    const int lo = q * len, m = std::min(len, n - lo);
    if (m > 0) out.segment(lo, m).noalias() = b.psi.middleCols(lo, m).transpose() * f;
  });
  return out * (b.grid().dx() / std::sqrt(2.0 * kPi));
}

inline CVec distorted_inverse(const DistortedBasis& b, const CVec& spec) {
  require(spec.size() == b.grid().size(), "spectrum does not match basis grid");
  const int n = b.grid().size(), len = (n + kProductBlocks - 1) / kProductBlocks;
  CVec out(n);
  parallel_for(kProductBlocks, [&](int q) {
    const int lo = q * len, m = std::min(len, n - lo);
    if (m > 0) out.segment(lo, m).noalias() = b.psi.middleRows(lo, m).conjugate() * spec;
  });
  return out * (b.grid().dxi() / std::sqrt(2.0 * kPi));
}

namespace detail {

inline void certify_basis(DistortedBasis& b, const BasisOptions& opt) {
  const SpatialGrid& g = b.grid();
  double plancherel = 0.0, roundtrip = 0.0;
  for (const CVec& f : schwartz_battery(g, opt.battery_size)) {
    const CVec spec = distorted_forward(b, f);
    const double nf = l2_norm(g, f);
    plancherel = std::max(plancherel, std::abs(spectral_l2_norm(g, spec) / nf - 1.0));
    roundtrip = std::max(roundtrip, l2_norm(g, CVec(distorted_inverse(b, spec) - f)) / nf);
  }
  b.report.plancherel_defect = plancherel;
  b.report.roundtrip_defect = roundtrip;
  // the round trip is reported only: its error is aliasing from the box edges
  b.report.certified = plancherel <= opt.plancherel_tolerance;
  if (opt.certify && !b.report.certified)
    throw BasisCertificationError("distorted basis fails Plancherel certification: defect " +
                                  std::to_string(plancherel));
}

/// Ψ ← √N · conj(U) with U the polar factor of Q = conj(Ψ)/√N. With
/// dx dτ = 2π/N the forward and inverse maps then become exact adjoints.
/// U = Q V Λ^{-1/2} V* from the eigenpairs of Q*Q; directions with σ below
/// 1e-5 carry no usable phase and are completed orthonormally instead.
inline void unitarize_basis(DistortedBasis& b) {
  const int n = b.grid().size();
  const CMat q = b.psi.conjugate() / std::sqrt(static_cast<double>(n));
  // Eigen's solver: the LAPACK divide-and-conquer drivers in this BLAS build
  // lose orthogonality within the large eigenvalue cluster at 1
  const Eigen::SelfAdjointEigenSolver<CMat> eig(q.adjoint() * q);
  if (eig.info() != Eigen::Success) throw NumericalError("eigensolver failed on the basis Gram matrix");
  const CMat& v = eig.eigenvectors();
  const RVec& lambda = eig.eigenvalues();
  const RVec sigma = lambda.cwiseMax(0.0).cwiseSqrt();
  b.report.sigma_min = sigma.minCoeff();
  b.report.sigma_max = sigma.maxCoeff();
  b.report.sigma_outliers = 0;
  int weak = 0;  // eigenvalues ascend, so the weak directions come first
  for (int k = 0; k < n; ++k) {
    if (std::abs(sigma[k] - 1.0) > 1e-6) ++b.report.sigma_outliers;
    if (sigma[k] < 1e-5) weak = k + 1;
  }
  CMat w = q * v;
  for (int k = weak; k < n; ++k) w.col(k) /= sigma[k];
  if (weak > 0) {
    const auto strong = w.rightCols(n - weak);
    CMat c = CMat::Zero(n, weak);
    for (int k = 0; k < weak; ++k) c(k % 2 == 0 ? k / 2 : n - 1 - k / 2, k) = 1.0;  // weak modes sit at the edges
    for (int pass = 0; pass < 2; ++pass) {
      c -= strong * (strong.adjoint() * c);
      c = Eigen::HouseholderQR<CMat>(c).householderQ() * CMat::Identity(n, weak);
    }
    w.leftCols(weak) = c;
  }
  CMat u = w * v.adjoint();
  u = 0.5 * u * (3.0 * CMat::Identity(n, n) - u.adjoint() * u);  // one Newton-Schulz polish
  b.psi = u.conjugate() * std::sqrt(static_cast<double>(n));
  b.dpsi.resize(0, 0);  // no longer consistent with Ψ
  b.report.unitarized = true;
}

}  // namespace detail

inline DistortedBasis build_distorted_basis(const Potential& v, const BasisOptions& opt = {}) {
  const SpatialGrid& g = v.grid;
  const int n = g.size(), half = n / 2;
  DistortedBasis b{v, CMat(), CMat(), {}, {}};
  b.psi.resize(n, n);
  if (opt.with_derivative) b.dpsi.resize(n, n);
  b.T.assign(n, cplx(1.0));

  if (v.zero()) {
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) {
        const cplx e = std::exp(I * (g.xi(k) * g.x(i)));
        b.psi(i, k) = e;
        if (opt.with_derivative) b.dpsi(i, k) = I * g.xi(k) * e;
      }
  } else {
    b.report.bound_states = count_bound_states(v);
    if (b.report.bound_states > 0)
      throw BasisCertificationError("potential has " + std::to_string(b.report.bound_states) +
                                    " bound state(s); the continuous-spectrum basis is incomplete");
    const Classification cls = zero_momentum_classification(v, opt.jost);
    b.report.T0 = cls.T0;
    std::vector<double> defects(half + 1, 0.0);
    // magnitude index m covers columns half + m (τ > 0) and half - m (τ < 0)
    parallel_for(half + 1, [&](int m) {
      const double tau = m * g.dxi();
      const JostSolution s = solve_jost(v, tau, opt.jost);
      cplx T = cls.T0;
      if (m > 0) {
        const MomentumCoefficients c = coefficients_from(g, s, 0.1);
        T = c.T;
        defects[m] = std::max(std::abs(std::norm(c.T) + std::norm(c.R_plus) - 1.0),
                              std::abs(std::norm(c.T) + std::norm(c.R_minus) - 1.0));
      }
      auto fill = [&](int col, double t, const CVec& mm, const CVec& dm, cplx coeff) {
        b.T[col] = coeff;
        for (int i = 0; i < n; ++i) {
          const cplx e = coeff * std::exp(I * (t * g.x(i)));
          b.psi(i, col) = e * mm[i];
          if (opt.with_derivative) b.dpsi(i, col) = e * (I * t * mm[i] + dm[i]);
        }
      };
      if (m == 0) {
        fill(half, 0.0, s.m_plus, s.dm_plus, T);
        return;
      }
      if (half + m < n) fill(half + m, tau, s.m_plus, s.dm_plus, T);
      fill(half - m, -tau, s.m_minus, s.dm_minus, T);
    });
    b.report.unitarity_defect = *std::max_element(defects.begin(), defects.end());
    if (b.report.unitarity_defect > opt.unitarity_tolerance)
      throw NumericalError("scattering data on the basis lattice violates unitarity by " +
                           std::to_string(b.report.unitarity_defect));
  }
  b.report.sup_psi = b.psi.cwiseAbs().maxCoeff();
  detail::certify_basis(b, opt);
  if (opt.unitarize) detail::unitarize_basis(b);
  return b;
}

inline WaveField distorted_transform(const DistortedBasis& b, const WaveField& f, Direction dir) {
  if (!b.report.certified) throw BasisCertificationError("distorted basis is not certified");
  return {dir == Direction::forward ? distorted_forward(b, f.values) : distorted_inverse(b, f.values), f.t};
}

/// g(-Δ) f or g(-Δ_V) f with g evaluated at λ = ξ² resp. τ².
template <class G>
CVec apply_multiplier(const DistortedBasis& b, G&& g, const CVec& f, Spectrum which) {
  const SpatialGrid& grid = b.grid();
  if (which == Spectrum::free) return apply_free_symbol(grid, f, [&](double xi) { return cplx(g(xi * xi)); });
  if (!b.report.certified) throw BasisCertificationError("distorted basis is not certified");
  CVec spec = distorted_forward(b, f);
  for (int k = 0; k < grid.size(); ++k) spec[k] *= cplx(g(b.tau(k) * b.tau(k)));
  return distorted_inverse(b, spec);
}

/// (-Δ)^{s/2} f or (-Δ_V)^{s/2} f.
inline CVec fractional_power(const DistortedBasis& b, double s, const CVec& f, Spectrum which) {
  require(s >= 0.0 && s <= 2.0, "fractional power needs 0 <= s <= 2");
  if (s == 0.0) return f;
  return apply_multiplier(b, [s](double lambda) { return std::pow(lambda, 0.5 * s); }, f, which);
}

/// Independent route to g(-Δ_V) f through the Jost kernel:
/// (2π)^{-1} ∫ g(τ²) [T(τ) f_+(x,τ) ∫_{y<x} f_-(y,τ) f(y) dy
///                    + T(-τ) f_-(x,-τ) ∫_{y>x} f_+(y,-τ) f(y) dy] dτ,
/// τ on the dual lattice.
template <class G>
CVec apply_multiplier_kernel(const Potential& v, G&& g, const CVec& f, const JostOptions& jost = {}) {
  const SpatialGrid& grid = v.grid;
  const int n = grid.size(), half = n / 2;
  const cplx T0 = v.zero() ? cplx(1.0) : zero_momentum_classification(v, jost).T0;
  std::vector<CVec> parts(half + 1, CVec::Zero(n));
  parallel_for(half + 1, [&](int m) {
    const double tau = m * grid.dxi();
    const double gv = g(tau * tau);
    if (gv == 0.0) return;
    const JostSolution s = v.zero() ? JostSolution{tau, CVec::Ones(n), CVec::Zero(n), CVec::Ones(n), CVec::Zero(n)}
                                    : solve_jost(v, tau, jost);
    const cplx T = m == 0 ? T0 : 2.0 * I * tau / wronskian(s, grid);
    CVec fp(n), fm(n), fpr(n), fmr(n);
    for (int i = 0; i < n; ++i) {
      const cplx e = std::exp(I * (tau * grid.x(i)));
      fp[i] = e * s.m_plus[i];                          // f_+(x, τ)
      fm[i] = std::conj(e) * s.m_minus[i];              // f_-(x, τ)
      fpr[i] = std::conj(e) * std::conj(s.m_plus[i]);   // f_+(x, -τ)
      fmr[i] = e * std::conj(s.m_minus[i]);             // f_-(x, -τ)
    }
    // a(x) ∫_{y<x} b f + c(x) ∫_{y>x} d f
    auto term = [&](cplx ta, const CVec& a, const CVec& bb, cplx tc, const CVec& c, const CVec& d) {
      const CVec q1 = bb.cwiseProduct(f), q2 = d.cwiseProduct(f);
      const CVec lower = cumulative_integral(grid, q1);
      const CVec below2 = cumulative_integral(grid, q2);
      const cplx total2 = q2.sum() * grid.dx();
      CVec r(n);
      for (int i = 0; i < n; ++i) r[i] = ta * a[i] * lower[i] + tc * c[i] * (total2 - below2[i]);
      return r;
    };
    CVec contrib = CVec::Zero(n);
    if (m < half) contrib += term(T, fp, fm, std::conj(T), fmr, fpr);
    if (m > 0) contrib += term(std::conj(T), fp.conjugate(), fm.conjugate(), T, fm, fp);
    parts[m] = contrib * gv;
  });
  CVec out = CVec::Zero(n);
  for (const CVec& p : parts) out += p;
  return out * (grid.dxi() / (2.0 * kPi));
}

}  // namespace nlsv
