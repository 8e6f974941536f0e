#pragma once

#include <lapacke.h>

#include "nlsv/core/potential.hpp"
#include "nlsv/core/quadrature.hpp"

namespace nlsv {

namespace detail {
// fourth-order five-point second difference
inline constexpr double kD2[5] = {-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0};
}  // namespace detail

/// -f'' + V f with the five-point stencil and zero values beyond the box.
inline CVec apply_hamiltonian(const Potential& v, const CVec& f) {
  const int n = v.grid.size();
  const double h2 = v.grid.dx() * v.grid.dx();
  CVec out(n);
  for (int i = 0; i < n; ++i) {
    cplx d2 = 0.0;
    for (int o = -2; o <= 2; ++o)
      if (i + o >= 0 && i + o < n) d2 += detail::kD2[o + 2] * f[i + o];
    out[i] = -d2 / h2 + v.samples[i] * f[i];
  }
  return out;
}

/// LU factorization of the banded matrix τ - Δ_V (Dirichlet box) for
/// repeated solves at one spectral parameter.
class Resolvent {
 public:
  Resolvent(const Potential& v, double tau) : n_(v.grid.size()), tau_(tau), band_(kRows * n_), pivots_(n_) {
    require(tau > 0.0, "resolvent needs a positive spectral parameter");
    const double h2 = v.grid.dx() * v.grid.dx();
    for (int j = 0; j < n_; ++j)
      for (int i = std::max(0, j - 2); i <= std::min(n_ - 1, j + 2); ++i) {
        double a = -detail::kD2[i - j + 2] / h2;
        if (i == j) a += tau + v.samples[i];
        band_[static_cast<std::size_t>(j) * kRows + (kKl + kKu + i - j)] = a;
      }
    const lapack_int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n_, n_, kKl, kKu, band_.data(), kRows, pivots_.data());
    if (info != 0) throw NumericalError("banded resolvent factorization failed (info " + std::to_string(info) + ")");
  }

  double tau() const { return tau_; }

  CVec solve(const CVec& f) const {
    require(f.size() == n_, "field does not match resolvent size");
    std::vector<double> rhs(2 * static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
      rhs[i] = f[i].real();
      rhs[n_ + i] = f[i].imag();
    }
    const lapack_int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n_, kKl, kKu, 2, band_.data(), kRows,
                                           pivots_.data(), rhs.data(), n_);
    if (info != 0) throw NumericalError("banded resolvent solve failed");
    CVec u(n_);
    for (int i = 0; i < n_; ++i) u[i] = cplx(rhs[i], rhs[n_ + i]);
    return u;
  }

 private:
  static constexpr int kKl = 2, kKu = 2, kRows = 2 * kKl + kKu + 1;
  int n_;
  double tau_;
  std::vector<double> band_;
  std::vector<lapack_int> pivots_;
};

/// (τ - Δ_V)^{-1} f.
inline CVec resolvent_apply(const Potential& v, double tau, const CVec& f) { return Resolvent(v, tau).solve(f); }

/// ||(τ - Δ_V) u - f||_2 / ||f||_2.
inline double resolvent_residual(const Potential& v, double tau, const CVec& u, const CVec& f) {
  const CVec r = apply_hamiltonian(v, u) + tau * u - f;
  return l2_norm(v.grid, r) / l2_norm(v.grid, f);
}

/// sup_x |u(x)| / (<τ>^{-1/2} ∫ e^{-√τ|x-y|} <y> |f(y)| dy), taken where the
/// envelope is not negligible.
inline double green_bound_constant(const Potential& v, double tau, const CVec& f) {
  const SpatialGrid& g = v.grid;
  const int n = g.size();
  const CVec u = resolvent_apply(v, tau, f);
  const double rt = std::sqrt(tau);
  RVec env = RVec::Zero(n);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += std::exp(-rt * std::abs(g.x(i) - g.x(j))) * japanese(g.x(j)) * std::abs(f[j]);
    env[i] = acc * g.dx() / std::sqrt(japanese(tau));
  }
  const double floor = 1e-8 * env.maxCoeff();
  double c = 0.0;
  for (int i = 0; i < n; ++i)
    if (env[i] > floor) c = std::max(c, std::abs(u[i]) / env[i]);
  return c;
}

/// ||(τ-Δ_V)^{-1} V_1 (τ-Δ_V)^{-1} f||_1 · τ<τ> / ||f||_∞ with V_1 = 2V + xV'.
inline double sandwich_bound_constant(const Potential& v, double tau, const CVec& f) {
  const Resolvent r(v, tau);
  const RVec v1 = virial_potential(v);
  const CVec w = r.solve(CVec(v1.cast<cplx>().cwiseProduct(r.solve(f))));
  return weighted_norm(v.grid, w, 1, 0.0) * tau * japanese(tau) / sup_norm(f);
}

}  // namespace nlsv
