#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hpclab/diagnostics/damped_modes.hpp"
#include "hpclab/hpc/initial_data.hpp"
#include "hpclab/ks/solver.hpp"
#include "hpclab/numerics/least_squares.hpp"

namespace hpclab::diagnostics {

using spectral::Grid;

struct RelaxationConfig {
  std::vector<double> epsilons{0.2, 0.1, 0.05};
  double tau_end = 2.0;
  double tau_snapshot = 0.02;
  double hpc_dt = 0.02;   // fast time t
  double ks_dt = 0.005;   // slow time tau
  double amplitude = 0.05;  // peak of rho0 - rho_bar
  double width = 1.0;
  double slope_lo = 0.8;
  double slope_hi = 1.2;
  int threads = 1;
};

/// Errors and residuals of one sweep member; time integrals are in tau.
struct RelaxationRow {
  double eps = 0.0;
  double sup_drho = 0.0;       // sup ||rho^eps - rho*||_{B^{d/2-1}}
  double int_drho = 0.0;       // int ||rho^eps - rho*||_{B^{d/2+1}}
  double int_du = 0.0;         // int ||u^eps - u*||_{B^{d/2}}
  double int_dphi = 0.0;       // int ||phi^eps - phi*||_{B^{d/2+1}} + ||.||_{B^{d/2+2}}
  double int_flux = 0.0;       // int ||rho^eps v^eps||_{B^{d/2}}
  double int_elliptic = 0.0;   // int ||-Delta phi^eps - a rho^eps + b phi^eps||_{B^{d/2}}
  double int_psi_rate = 0.0;   // int ||d_t psi||_{B^{d/2}} (fast-time rate, eps d_tau phi^eps)
  double initial_drho = 0.0;   // ||rho0 - rho*0||_{B^{d/2-1}}
  std::size_t samples = 0;
};

struct RelaxationReport {
  std::vector<RelaxationRow> rows;
  double slope_sup_drho = 0.0;
  double slope_int_drho = 0.0;
  double slope_int_du = 0.0;
  double slope_int_dphi = 0.0;
  double slope_int_flux = 0.0;
  double slope_int_elliptic = 0.0;
  bool slopes_in_window = false;
};

/// Shared density bump rho0 = rho_bar + A exp(-|x - c|^2 / (2 w^2)).
inline SpectralField relaxation_density(const Grid& g, const ModelParams& p, double amplitude, double width) {
  SpectralField rho = amplitude * hpc::periodic_gaussian(g, width, {});
  rho(0, 0) += p.rho_bar();
  return rho;
}

/// Well-prepared HPC data: n0 = n(rho0), u0 = eps u*0, psi0 = a (b - Delta)^{-1}(rho0 - rho_bar).
inline HpcState well_prepared_relaxation_data(const SpectralField& rho0, const ModelParams& p) {
  const Grid& g = rho0.grid();
  HpcState s(g, p);
  auto rx = rho0.to_physical();
  for (auto& v : rx) v = model::enthalpy_n(v, p);
  s.n = SpectralField::from_physical(g, rx, 1);
  const SpectralField phi = ks::solve_phi(rho0, p);
  s.u = p.epsilon() * ks::reconstruct_velocity(rho0, phi, p);
  SpectralField dev = rho0;
  dev(0, 0) -= p.rho_bar();
  s.psi = p.a() * spectral::bessel_inverse(dev, p.b());
  hpc::HpcSolver::clean(s);
  return s;
}

namespace detail {

inline double besov(const SpectralField& f, double s) { return spectral::besov_norm(f, s, spectral::Summability::one); }

inline double trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
  double acc = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) acc += 0.5 * (t[k] - t[k - 1]) * (f[k] + f[k - 1]);
  return acc;
}

inline SpectralField density_field(const SpectralField& n, const ModelParams& p) {
  return SpectralField::from_physical(n.grid(), hpc::density_samples(n, p), 1);
}

}  // namespace detail

/// Run one sweep member and compare it with the limit trajectory on the tau grid.
inline RelaxationRow relaxation_member(const SpectralField& rho0, const ModelParams& base, double eps,
                                       const RelaxationConfig& cfg, const ks::KsTrajectory& limit) {
  const ModelParams p = base.with_epsilon(eps);
  const Grid& g = rho0.grid();
  const double half = g.dim() / 2.0;
  hpc::SolverConfig hc;
  hc.dt = cfg.hpc_dt;
  hc.t_end = cfg.tau_end / eps;
  hc.snapshot_every = cfg.tau_snapshot / eps;
  const hpc::HpcSolver solver(p, g, hc);
  const auto traj = solver.run(well_prepared_relaxation_data(rho0, p));
  if (traj.blew_up) {
    throw BlowUp("relaxation member eps = " + std::to_string(eps) + " blew up: " + traj.blowup_reason);
  }
  if (traj.snapshots.size() != limit.snapshots.size()) {
    throw std::logic_error("relaxation member and limit trajectory have different sample counts");
  }
  RelaxationRow row;
  row.eps = eps;
  row.samples = traj.snapshots.size();
  std::vector<double> tau, drho_hi, du, dphi, flux, ell, rate;
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const auto& s = traj.snapshots[k];
    const auto& r = limit.snapshots[k].rho;
    tau.push_back(eps * s.t);
    const SpectralField rho = detail::density_field(s.n, p);
    const SpectralField drho = rho - r;
    const auto bd = spectral::block_norms(drho);
    row.sup_drho = std::max(row.sup_drho, spectral::besov_norm(bd, half - 1.0, spectral::Summability::one));
    if (k == 0) row.initial_drho = row.sup_drho;
    drho_hi.push_back(spectral::besov_norm(bd, half + 1.0, spectral::Summability::one));

    const SpectralField phi_star = ks::solve_phi(r, p);
    const SpectralField u_star = ks::reconstruct_velocity(r, phi_star, p);
    du.push_back(detail::besov((1.0 / eps) * s.u - u_star, half));

    SpectralField phi = s.psi;
    phi(0, 0) += p.phi_bar();
    const auto bp = spectral::block_norms(phi - phi_star);
    dphi.push_back(spectral::besov_norm(bp, half + 1.0, spectral::Summability::one) +
                   spectral::besov_norm(bp, half + 2.0, spectral::Summability::one));

    SpectralField v = (1.0 / eps) * s.u;
    v += spectral::gradient(s.n);
    v -= p.mu() * spectral::gradient(s.psi);
    const auto vx = v.to_physical();
    const auto rx = rho.to_physical();
    std::vector<double> fx(vx.size());
    for (int a = 0; a < g.dim(); ++a) {
      for (std::size_t i = 0; i < rx.size(); ++i) fx[a * rx.size() + i] = rx[i] * vx[a * rx.size() + i];
    }
    flux.push_back(detail::besov(SpectralField::from_physical(g, fx, g.dim()), half));

    SpectralField e = p.b() * phi - spectral::laplacian(phi);
    e -= p.a() * rho;
    ell.push_back(detail::besov(e, half));
    rate.push_back(detail::besov(psi_rate(s.n, s.psi, p), half));
  }
  row.int_drho = detail::trapezoid(tau, drho_hi);
  row.int_du = detail::trapezoid(tau, du);
  row.int_dphi = detail::trapezoid(tau, dphi);
  row.int_flux = detail::trapezoid(tau, flux);
  row.int_elliptic = detail::trapezoid(tau, ell);
  row.int_psi_rate = detail::trapezoid(tau, rate);
  return row;
}

/// Sweep over eps: each member runs the damped system to tau_end and is
/// compared with the parabolic-elliptic limit started from the same density.
inline RelaxationReport relaxation_sweep(const SpectralField& rho0, const ModelParams& base,
                                         const RelaxationConfig& cfg) {
  if (cfg.epsilons.size() < 3) throw std::invalid_argument("relaxation sweep needs at least three eps values");
  for (double e : cfg.epsilons) {
    if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("sweep eps values must lie in (0, 1)");
  }
  if (!(base.stability_margin() > 0.0)) throw std::invalid_argument("relaxation sweep needs a positive stability margin");
  if (!(cfg.tau_end > 0.0 && cfg.tau_snapshot > 0.0)) throw std::invalid_argument("tau_end and tau_snapshot must be positive");

  hpc::SolverConfig kc;
  kc.dt = cfg.ks_dt;
  kc.t_end = cfg.tau_end;
  kc.snapshot_every = cfg.tau_snapshot;
  const ks::KsSolver ks_solver(base, rho0.grid(), kc);
  ks::KsState init = ks_solver.make_state();
  init.rho = rho0;
  const auto limit = ks_solver.run(init);
  if (limit.blew_up) throw BlowUp("limit trajectory blew up: " + limit.blowup_reason);

  RelaxationReport rep;
  rep.rows.resize(cfg.epsilons.size());
  std::vector<std::string> errors(cfg.epsilons.size());
  auto work = [&](std::size_t k) {
    try {
      rep.rows[k] = relaxation_member(rho0, base, cfg.epsilons[k], cfg, limit);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  };
  const std::size_t threads = static_cast<std::size_t>(std::max(1, cfg.threads));
  for (std::size_t start = 0; start < cfg.epsilons.size(); start += threads) {
    std::vector<std::thread> pool;
    const std::size_t stop = std::min(cfg.epsilons.size(), start + threads);
    if (threads == 1) {
      work(start);
      continue;
    }
    for (std::size_t k = start; k < stop; ++k) pool.emplace_back(work, k);
    for (auto& t : pool) t.join();
  }
  for (std::size_t k = 0; k < errors.size(); ++k) {
    if (!errors[k].empty()) throw BlowUp(errors[k]);
  }

  std::vector<double> eps;
  for (const auto& r : rep.rows) eps.push_back(r.eps);
  auto slope = [&](auto member) {
    std::vector<double> y;
    for (const auto& r : rep.rows) y.push_back(r.*member);
    return numerics::fit_loglog(eps, y).slope;
  };
  rep.slope_sup_drho = slope(&RelaxationRow::sup_drho);
  rep.slope_int_drho = slope(&RelaxationRow::int_drho);
  rep.slope_int_du = slope(&RelaxationRow::int_du);
  rep.slope_int_dphi = slope(&RelaxationRow::int_dphi);
  rep.slope_int_flux = slope(&RelaxationRow::int_flux);
  rep.slope_int_elliptic = slope(&RelaxationRow::int_elliptic);
  auto in = [&](double s) { return s >= cfg.slope_lo && s <= cfg.slope_hi; };
  rep.slopes_in_window = in(rep.slope_sup_drho) && in(rep.slope_int_du);
  return rep;
}

/// Largest over smallest of x_k / eps_k across the sweep.
inline double spread_over_eps(const RelaxationReport& rep, double RelaxationRow::*member) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& r : rep.rows) {
    const double v = r.*member / r.eps;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi / lo;
}

}  // namespace hpclab::diagnostics
