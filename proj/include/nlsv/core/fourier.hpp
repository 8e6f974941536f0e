#pragma once

#include <unsupported/Eigen/FFT>

#include "nlsv/core/field.hpp"

namespace nlsv {

enum class Direction { forward, inverse };

namespace detail {
inline Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine;
  return engine;
}
}  // namespace detail

/// F f(xi_k) = (2 pi)^{-1/2} sum_i e^{+i xi_k x_i} f_i dx, spectrum returned in
/// ascending xi order. Unitary between (C^N, dx) and (C^N, dxi).
inline CVec fourier_forward(const SpatialGrid& g, const CVec& f) {
  const int n = g.size();
  require(f.size() == n, "field does not match grid");
  CVec raw(n);
  detail::fft_engine().inv(raw, f);  // carries 1/n and e^{+2 pi i m i / n}
  const double scale = g.dx() * n / std::sqrt(2.0 * kPi);
  CVec out(n);
  for (int k = 0; k < n; ++k) {
    const int m = k - n / 2;
    const int idx = (m % n + n) % n;
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    out[k] = sign * scale * raw[idx];
  }
  return out;
}

/// F^{-1} F(x_i) = (2 pi)^{-1/2} sum_k e^{-i xi_k x_i} F_k dxi.
inline CVec fourier_inverse(const SpatialGrid& g, const CVec& spec) {
  const int n = g.size();
  require(spec.size() == n, "spectrum does not match grid");
  CVec shuffled(n);
  for (int k = 0; k < n; ++k) {
    const int m = k - n / 2;
    const int idx = (m % n + n) % n;
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    shuffled[idx] = sign * spec[k];
  }
  CVec out(n);
  detail::fft_engine().fwd(out, shuffled);
  return out * (g.dxi() / std::sqrt(2.0 * kPi));
}

inline WaveField fourier_pair(const SpatialGrid& g, const WaveField& f, Direction dir) {
  return {dir == Direction::forward ? fourier_forward(g, f.values) : fourier_inverse(g, f.values), f.t};
}

/// F^{-1}( m(xi) F f ).
template <class Symbol>
CVec apply_free_symbol(const SpatialGrid& g, const CVec& f, Symbol&& symbol) {
  CVec spec = fourier_forward(g, f);
  for (int k = 0; k < g.size(); ++k) spec[k] *= symbol(g.xi(k));
  return fourier_inverse(g, spec);
}

/// d/dx via the lattice; the unpaired Nyquist mode is dropped.
inline CVec spectral_derivative(const SpatialGrid& g, const CVec& f) {
  const double nyq = -g.max_frequency();
  return apply_free_symbol(g, f, [nyq](double xi) { return xi == nyq ? cplx(0.0) : cplx(0.0, -xi); });
}

inline CVec spectral_derivative(const SpatialGrid& g, const RVec& f) {
  return spectral_derivative(g, CVec(f.cast<cplx>()));
}

/// Q(x_i) = int_{-L}^{x_i} q, spectrally: mean part integrated exactly, the
/// periodic remainder through its lattice antiderivative.
inline CVec cumulative_integral(const SpatialGrid& g, const CVec& q) {
  const int n = g.size();
  require(q.size() == n, "field does not match grid");
  CVec c(n);
  detail::fft_engine().fwd(c, q);
  const cplx mean = c[0] / static_cast<double>(n);
  c[0] = 0.0;
  c[n / 2] = 0.0;
  for (int m = 1; m < n; ++m) {
    const int mm = m < n / 2 ? m : m - n;
    if (m != n / 2) c[m] /= cplx(0.0, mm * kPi / g.half_width());
  }
  CVec p(n);
  detail::fft_engine().inv(p, c);
  CVec out(n);
  for (int i = 0; i < n; ++i) out[i] = mean * (g.x(i) + g.half_width()) + p[i] - p[0];
  return out;
}

}  // namespace nlsv
