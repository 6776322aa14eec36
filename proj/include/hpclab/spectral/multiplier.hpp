#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>

#include "hpclab/spectral/field.hpp"

namespace hpclab::spectral {

/// Multiply every component by symbol(xi, |xi|). The symbol must be finite
/// on every grid mode.
template <class Symbol>
SpectralField apply_multiplier(const SpectralField& f, Symbol&& symbol) {
  SpectralField out(f.grid(), f.components());
  const Grid& g = f.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const cplx s = symbol(g.wavevector(i), g.wavenumber(i));
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
      throw std::domain_error("multiplier is not finite at |xi| = " + std::to_string(g.wavenumber(i)));
    }
    for (int c = 0; c < f.components(); ++c) out(c, i) = s * f(c, i);
  }
  return out;
}

/// Partial derivative along axis; the Nyquist mode is dropped.
inline SpectralField partial(const SpectralField& f, int axis) {
  const Grid& g = f.grid();
  if (axis < 0 || axis >= g.dim()) throw std::invalid_argument("axis out of range");
  SpectralField out(g, f.components());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.is_nyquist(i)) continue;
    const cplx s(0.0, g.wavevector(i)[axis]);
    for (int c = 0; c < f.components(); ++c) out(c, i) = s * f(c, i);
  }
  return out;
}

inline SpectralField gradient(const SpectralField& f) {
  if (f.components() != 1) throw std::invalid_argument("gradient expects a scalar field");
  const Grid& g = f.grid();
  SpectralField out(g, g.dim());
  for (int a = 0; a < g.dim(); ++a) out.assign_component(a, partial(f, a));
  return out;
}

inline SpectralField divergence(const SpectralField& u) {
  const Grid& g = u.grid();
  if (u.components() != g.dim()) throw std::invalid_argument("divergence expects a d-vector field");
  SpectralField out(g, 1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.is_nyquist(i)) continue;
    cplx s = 0.0;
    for (int a = 0; a < g.dim(); ++a) s += cplx(0.0, g.wavevector(i)[a]) * u(a, i);
    out(0, i) = s;
  }
  return out;
}

inline SpectralField laplacian(const SpectralField& f) {
  return apply_multiplier(f, [](std::span<const double>, double k) { return cplx(-k * k); });
}

/// Homogeneous |xi|^s; the zero mode is mapped to zero unless s == 0.
inline SpectralField lambda_power(const SpectralField& f, double s) {
  return apply_multiplier(f, [s](std::span<const double>, double k) {
    if (s == 0.0) return cplx(1.0);
    return k == 0.0 ? cplx(0.0) : cplx(std::pow(k, s));
  });
}

/// (b - Delta)^{-1}.
inline SpectralField bessel_inverse(const SpectralField& f, double b) {
  if (!(b > 0.0)) throw std::invalid_argument("bessel_inverse needs b > 0");
  return apply_multiplier(f, [b](std::span<const double>, double k) { return cplx(1.0 / (b + k * k)); });
}

/// 2/3-rule truncation.
inline SpectralField dealias(const SpectralField& f) {
  SpectralField out = f;
  const Grid& g = f.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.is_resolved(i)) continue;
    for (int c = 0; c < f.components(); ++c) out(c, i) = 0.0;
  }
  return out;
}

}  // namespace hpclab::spectral
