#pragma once

#include <cmath>
#include <vector>

#include "hpclab/hpc/solver.hpp"
#include "hpclab/spectral/littlewood_paley.hpp"
#include "hpclab/spectral/multiplier.hpp"

namespace hpclab::diagnostics {

using hpc::HpcState;
using model::ModelParams;
using spectral::SpectralField;

/// Effective (damped) unknowns of a state.
struct DampedModes {
  SpectralField v;          // u + eps grad n - eps mu grad psi
  SpectralField phi_eff;    // psi - (b - Delta)^{-1}(c1 n + H(n))
  SpectralField phi_tilde;  // b psi - c1 n
  SpectralField coupling;   // b psi - c1 n - H(n), equal to b phi - a rho
};

/// H(n) sampled pointwise and transformed back.
inline SpectralField nonlinear_H(const SpectralField& n, const ModelParams& p) {
  auto x = n.to_physical();
  for (auto& v : x) v = model::coefficient_H(v, p);
  return SpectralField::from_physical(n.grid(), x, 1);
}

inline SpectralField nonlinear_G(const SpectralField& n, const ModelParams& p) {
  auto x = n.to_physical();
  for (auto& v : x) v = model::coefficient_G(v, p);
  return SpectralField::from_physical(n.grid(), x, 1);
}

inline DampedModes effective_modes(const HpcState& s) {
  const auto& p = s.params;
  const double eps = p.epsilon();
  const SpectralField H = nonlinear_H(s.n, p);
  SpectralField v = s.u;
  v += eps * spectral::gradient(s.n);
  v -= (eps * p.mu()) * spectral::gradient(s.psi);
  SpectralField src = p.c1() * s.n;
  src += H;
  SpectralField phi_eff = s.psi - spectral::bessel_inverse(src, p.b());
  SpectralField phi_tilde = p.b() * s.psi - p.c1() * s.n;
  SpectralField coupling = phi_tilde - H;
  return {std::move(v), std::move(phi_eff), std::move(phi_tilde), std::move(coupling)};
}

/// b phi - a rho assembled directly from phi = psi + phi_bar and rho = rho(n).
inline SpectralField coupling_from_primitives(const HpcState& s) {
  const auto& p = s.params;
  const auto nx = s.n.to_physical();
  const auto px = s.psi.to_physical();
  std::vector<double> out(nx.size());
  for (std::size_t i = 0; i < nx.size(); ++i) {
    out[i] = p.b() * (px[i] + p.phi_bar()) - p.a() * model::density_rho(nx[i], p);
  }
  return SpectralField::from_physical(s.grid(), out, 1);
}

/// d/dt psi from the psi equation: Delta psi - b psi + c1 n + H(n).
inline SpectralField psi_rate(const SpectralField& n, const SpectralField& psi, const ModelParams& p) {
  SpectralField r = spectral::laplacian(psi);
  r -= p.b() * psi;
  r += p.c1() * n;
  r += nonlinear_H(n, p);
  return r;
}

struct DampedDecayReport {
  double velocity_integral = 0.0;       // int (1/eps) ||v||^l_{B^{d/2}} dt
  double concentration_integral = 0.0;  // int ||phi_eff||^l_{B^{d/2} cap B^{d/2+2}} dt
  double x0 = 0.0;
  double bound = 20.0;
  bool within_bound = true;
};

/// Time integrals (trapezoid over the snapshots) of the low-frequency damped
/// modes, compared against bound * X0.
inline DampedDecayReport damped_mode_decay_check(const std::vector<HpcState>& snaps, double bound = 20.0) {
  DampedDecayReport rep;
  rep.bound = bound;
  if (snaps.empty()) return rep;
  const auto& p = snaps.front().params;
  const double s = snaps.front().grid().dim() / 2.0;
  const int J = spectral::compute_threshold(p.epsilon(), p.threshold_offset());
  rep.x0 = hpc::hybrid_breakdown(snaps.front()).aggregate;
  std::vector<double> fv, fp;
  for (const auto& st : snaps) {
    const auto m = effective_modes(st);
    const auto bv = spectral::block_norms(m.v);
    const auto bp = spectral::block_norms(m.phi_eff);
    const auto one = spectral::Summability::one;
    fv.push_back(spectral::hybrid_norm(bv, s, s, one, J).low / p.epsilon());
    fp.push_back(spectral::hybrid_norm(bp, s, s, one, J).low + spectral::hybrid_norm(bp, s + 2.0, s, one, J).low);
  }
  for (std::size_t k = 1; k < snaps.size(); ++k) {
    const double h = snaps[k].t - snaps[k - 1].t;
    rep.velocity_integral += 0.5 * h * (fv[k] + fv[k - 1]);
    rep.concentration_integral += 0.5 * h * (fp[k] + fp[k - 1]);
  }
  rep.within_bound = rep.velocity_integral <= bound * rep.x0 && rep.concentration_integral <= bound * rep.x0;
  return rep;
}

}  // namespace hpclab::diagnostics
