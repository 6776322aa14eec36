#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hpclab/diagnostics/damped_modes.hpp"

namespace hpclab::diagnostics {

/// Block-level energy L_j and dissipation H_j of the high-frequency
/// Lyapunov functional, with the reference block norm
/// eps ||(n_j, u_j, psi_j, grad psi_j, 2^{-j} H(n)_j)||^2.
struct LyapunovRecord {
  double t = 0.0;
  int j = 0;
  double L = 0.0;
  double H = 0.0;
  double block_norm_sq = 0.0;
  double w_min = 0.0;
  double w_max = 0.0;

  double ratio1() const { return L / block_norm_sq; }
  double ratio2(double eps) const { return eps * H / L; }
};

namespace detail {

inline double inner(const std::vector<double>& a, const std::vector<double>& b, double cell) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * cell;
}

inline double weighted(const std::vector<double>& w, const std::vector<double>& a, int comps, double cell) {
  const std::size_t n = w.size();
  double s = 0.0;
  for (int c = 0; c < comps; ++c) {
    for (std::size_t i = 0; i < n; ++i) s += w[i] * a[c * n + i] * a[c * n + i];
  }
  return s * cell;
}

}  // namespace detail

/// Shared per-state fields for evaluating several blocks.
struct LyapunovContext {
  SpectralField H;  // H(n)
  SpectralField G;  // G(n)
};

inline LyapunovContext lyapunov_context(const HpcState& s) {
  return {nonlinear_H(s.n, s.params), nonlinear_G(s.n, s.params)};
}

inline LyapunovRecord lyapunov_evaluate(const HpcState& s, const LyapunovContext& ctx, int j, double eta0) {
  if (!(eta0 > 0.0 && eta0 < 1.0)) throw std::invalid_argument("eta0 must lie in (0, 1)");
  const auto& p = s.params;
  const double eps = p.epsilon(), mu = p.mu(), b = p.b(), c1 = p.c1();
  const double cell = s.grid().cell_volume();
  const double q = std::exp2(-2.0 * j);

  const SpectralField nj = spectral::dyadic_block(s.n, j);
  const SpectralField uj = spectral::dyadic_block(s.u, j);
  const SpectralField pj = spectral::dyadic_block(s.psi, j);
  const SpectralField hj = spectral::dyadic_block(ctx.H, j);

  const auto n = nj.to_physical();
  const auto u = uj.to_physical();
  const auto psi = pj.to_physical();
  const auto h = hj.to_physical();
  const auto gn = spectral::gradient(nj).to_physical();
  const auto gp = spectral::gradient(pj).to_physical();
  const auto lp = spectral::laplacian(pj).to_physical();
  const auto du = spectral::divergence(uj).to_physical();
  std::vector<double> rate(n.size());
  for (std::size_t i = 0; i < rate.size(); ++i) rate[i] = lp[i] - b * psi[i] + c1 * n[i] + h[i];

  auto w = (spectral::low_pass(ctx.G, j - 1)).to_physical();
  for (auto& v : w) v += p.c0();

  LyapunovRecord r;
  r.t = s.t;
  r.j = j;
  r.w_min = *std::min_element(w.begin(), w.end());
  r.w_max = *std::max_element(w.begin(), w.end());

  const int d = s.grid().dim();
  const double nn = detail::inner(n, n, cell);
  const double hh = detail::inner(h, h, cell);
  const double wuu = detail::weighted(w, u, d, cell);
  const double uu = detail::inner(u, u, cell);
  const double pp = detail::inner(psi, psi, cell);
  const double gpgp = detail::inner(gp, gp, cell);
  const double np = detail::inner(n, psi, cell);
  const double hp = detail::inner(h, psi, cell);
  const double ugn = detail::inner(u, gn, cell);
  const double gngn = detail::inner(gn, gn, cell);
  const double lplp = detail::inner(lp, lp, cell);
  const double gngp = detail::inner(gn, gp, cell);
  const double wdd = detail::weighted(w, du, 1, cell);
  const double rr = detail::inner(rate, rate, cell);

  r.L = eps * (0.5 * nn + q / (2.0 * eta0) * hh + 0.5 * wuu + mu * b / (2.0 * c1) * pp + mu / (2.0 * c1) * gpgp -
               mu * np - hp) +
        eta0 * q * (mu / (2.0 * c1) * gpgp + ugn);
  r.H = eps * (wuu / eps + rr) +
        eta0 * q * (gngn + mu * b / c1 * gpgp + mu / c1 * lplp - 2.0 * mu * gngp - wdd + ugn / eps);
  r.block_norm_sq = eps * (nn + uu + pp + gpgp + q * hh);
  return r;
}

inline LyapunovRecord lyapunov_evaluate(const HpcState& s, int j, double eta0) {
  return lyapunov_evaluate(s, lyapunov_context(s), j, eta0);
}

struct LyapunovReport {
  std::vector<LyapunovRecord> records;  // every evaluated (snapshot, block)
  std::vector<LyapunovRecord> violations;
  std::size_t checked = 0;
  std::size_t skipped = 0;
  double ratio1_min = std::numeric_limits<double>::infinity();
  double ratio1_max = -std::numeric_limits<double>::infinity();
  double ratio2_min = std::numeric_limits<double>::infinity();
  int j_lo = 0;
  int j_hi = 0;

  bool passed() const { return violations.empty(); }
};

/// Check L_j ~ eps ||block||^2 and eps H_j >= L_j / c_tol for every snapshot
/// and every active j >= J_eps - 1. Blocks whose functional and reference norm
/// are both at or below the noise floor are skipped.
inline LyapunovReport lyapunov_equivalence_check(const std::vector<HpcState>& snaps, double eta0, double c_tol = 10.0,
                                                 double noise_floor = 1e-20) {
  if (!(c_tol > 1.0)) throw std::invalid_argument("c_tol must exceed 1");
  LyapunovReport rep;
  if (snaps.empty()) return rep;
  const auto& p = snaps.front().params;
  const auto dec = spectral::DyadicDecomposition::for_grid(snaps.front().grid());
  rep.j_lo = std::max(dec.j_min, spectral::compute_threshold(p.epsilon(), p.threshold_offset()) - 1);
  rep.j_hi = dec.j_max;
  const double eps = p.epsilon();
  for (const auto& s : snaps) {
    const auto ctx = lyapunov_context(s);
    for (int j = rep.j_lo; j <= rep.j_hi; ++j) {
      const auto r = lyapunov_evaluate(s, ctx, j, eta0);
      rep.records.push_back(r);
      if (std::abs(r.L) <= noise_floor && r.block_norm_sq <= noise_floor) {
        ++rep.skipped;
        continue;
      }
      ++rep.checked;
      const double r1 = r.ratio1();
      const double r2 = r.ratio2(eps);
      rep.ratio1_min = std::min(rep.ratio1_min, r1);
      rep.ratio1_max = std::max(rep.ratio1_max, r1);
      rep.ratio2_min = std::min(rep.ratio2_min, r2);
      const bool ok = r.L > 0.0 && r1 >= 1.0 / c_tol && r1 <= c_tol && r2 >= 1.0 / c_tol;
      if (!ok) rep.violations.push_back(r);
    }
  }
  return rep;
}

}  // namespace hpclab::diagnostics
