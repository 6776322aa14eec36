#pragma once

#include <cmath>
#include <vector>

#include "hpclab/model/params.hpp"
#include "hpclab/spectral/littlewood_paley.hpp"
#include "hpclab/spectral/multiplier.hpp"
#include "hpclab/spectral/snapshot_io.hpp"

namespace hpclab::hpc {

using model::ModelParams;
using spectral::Grid;
using spectral::SpectralField;

/// Solution of the damped system in (n, u, psi) at time t.
struct HpcState {
  double t = 0.0;
  SpectralField n;
  SpectralField u;
  SpectralField psi;
  ModelParams params;

  HpcState(const Grid& g, const ModelParams& p) : n(g, 1), u(g, g.dim()), psi(g, 1), params(p) {}

  const Grid& grid() const { return n.grid(); }

  spectral::Snapshot snapshot() const { return {t, {{"n", n}, {"u", u}, {"psi", psi}}}; }
};

/// Physical density samples rho(n(x)); throws WindowViolation off the window.
inline std::vector<double> density_samples(const SpectralField& n, const ModelParams& p) {
  auto x = n.to_physical();
  for (auto& v : x) v = model::density_rho(v, p);
  return x;
}

inline double total_mass(const SpectralField& n, const ModelParams& p) {
  const auto rho = density_samples(n, p);
  double s = 0.0;
  for (double v : rho) s += v;
  return s * n.grid().cell_volume();
}

/// Hybrid aggregate ||(n,u,psi)||^l_{B^{d/2}} + eps ||(n,u,grad psi)||^h_{B^{d/2+1}},
/// each field's norm taken separately.
struct HybridBreakdown {
  double n_low = 0.0, u_low = 0.0, psi_low = 0.0;
  double n_high = 0.0, u_high = 0.0, grad_psi_high = 0.0;
  double aggregate = 0.0;
};

inline HybridBreakdown hybrid_breakdown(const SpectralField& n, const SpectralField& u, const SpectralField& psi,
                                        const ModelParams& p) {
  const Grid& g = n.grid();
  const double s = g.dim() / 2.0;
  const int J = spectral::compute_threshold(p.epsilon(), p.threshold_offset());
  const auto one = spectral::Summability::one;
  const auto hn = spectral::hybrid_norm(n, s, s + 1.0, one, J);
  const auto hu = spectral::hybrid_norm(u, s, s + 1.0, one, J);
  const auto hp = spectral::hybrid_norm(psi, s, s + 1.0, one, J);
  const auto hg = spectral::hybrid_norm(spectral::gradient(psi), s, s + 1.0, one, J);
  HybridBreakdown b;
  b.n_low = hn.low;
  b.u_low = hu.low;
  b.psi_low = hp.low;
  b.n_high = hn.high;
  b.u_high = hu.high;
  b.grad_psi_high = hg.high;
  b.aggregate = b.n_low + b.u_low + b.psi_low + p.epsilon() * (b.n_high + b.u_high + b.grad_psi_high);
  return b;
}

inline HybridBreakdown hybrid_breakdown(const HpcState& s) { return hybrid_breakdown(s.n, s.u, s.psi, s.params); }

}  // namespace hpclab::hpc
