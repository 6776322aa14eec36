#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "hpclab/errors.hpp"
#include "hpclab/hpc/solver.hpp"
#include "hpclab/linear/propagator.hpp"
#include "hpclab/model/params.hpp"
#include "hpclab/spectral/littlewood_paley.hpp"
#include "hpclab/spectral/multiplier.hpp"

namespace hpclab::ks {

using model::ModelParams;
using spectral::cplx;
using spectral::Grid;
using spectral::SpectralField;

/// Symbol of the linearized operator: -(P'(rho_bar) - mu a rho_bar/(b + xi^2)) xi^2.
inline double ks_symbol(double xi, const ModelParams& p) {
  const double k2 = xi * xi;
  return -(p.c0() - p.mu() * p.a() * p.rho_bar() / (p.b() + k2)) * k2;
}

/// G1(rho) = (P(rho) - P(rho_bar))/(rho - rho_bar) - P'(rho_bar), with its
/// second-order Taylor form near rho_bar.
inline double G1_eval(double rho, const ModelParams& p) {
  if (!(rho >= model::window_low(p) && rho <= model::window_high(p))) {
    throw WindowViolation("density " + std::to_string(rho) + " outside [rho_bar/2, 2 rho_bar]");
  }
  const auto& P = p.pressure();
  const double rb = p.rho_bar();
  const double d = rho - rb;
  if (std::abs(d) <= 1e-6 * rb) {
    return P.second_derivative(rb) * d / 2.0 + P.third_derivative(rb) * d * d / 6.0;
  }
  // kappa rb^gamma expm1(gamma log1p(x)) / d avoids the cancellation in P(rho) - P(rb).
  const double x = d / rb;
  const double quotient = P.kappa() * std::pow(rb, P.gamma() - 1.0) * std::expm1(P.gamma() * std::log1p(x)) / x;
  return quotient - P.derivative(rb);
}

/// phi* = phi_bar + a (b - Delta)^{-1}(rho* - rho_bar) = a (b - Delta)^{-1} rho*.
inline SpectralField solve_phi(const SpectralField& rho, const ModelParams& p) {
  return p.a() * spectral::bessel_inverse(rho, p.b());
}

/// u* = (-grad P(rho*) + mu rho* grad phi*) / rho*, pointwise.
inline SpectralField reconstruct_velocity(const SpectralField& rho, const SpectralField& phi, const ModelParams& p) {
  const Grid& g = rho.grid();
  const int d = g.dim();
  const std::size_t size = g.size();
  const auto rx = rho.to_physical();
  std::vector<double> px(size);
  for (std::size_t i = 0; i < size; ++i) {
    if (!(rx[i] >= model::window_low(p) && rx[i] <= model::window_high(p))) {
      throw WindowViolation("density " + std::to_string(rx[i]) + " outside [rho_bar/2, 2 rho_bar]");
    }
    px[i] = p.pressure().pressure(rx[i]) - p.pressure().pressure(p.rho_bar());
  }
  const auto gp = spectral::gradient(SpectralField::from_physical(g, px, 1)).to_physical();
  const auto gphi = spectral::gradient(phi).to_physical();
  std::vector<double> ux(size * d);
  for (int a = 0; a < d; ++a) {
    for (std::size_t i = 0; i < size; ++i) {
      ux[a * size + i] = (-gp[a * size + i] + p.mu() * rx[i] * gphi[a * size + i]) / rx[i];
    }
  }
  return SpectralField::from_physical(g, ux, d);
}

struct KsState {
  double tau = 0.0;
  SpectralField rho;
  ModelParams params;

  KsState(const Grid& g, const ModelParams& p) : rho(g, 1), params(p) { rho(0, 0) = p.rho_bar(); }

  spectral::Snapshot snapshot() const { return {tau, {{"rho", rho}}}; }
};

struct KsSeriesRow {
  double tau = 0.0;
  double mass = 0.0;
  double low = 0.0;   // ||rho* - rho_bar||_{B^{d/2}}
  double high = 0.0;  // ||rho* - rho_bar||_{B^{d/2+2}}
};

struct KsTrajectory {
  std::vector<KsState> snapshots;
  std::vector<KsSeriesRow> series;
  bool blew_up = false;
  double blowup_time = 0.0;
  std::string blowup_reason;
};

/// ETDRK2 in slow time tau with the exact factors exp(h ks_symbol).
class KsSolver {
 public:
  KsSolver(ModelParams params, Grid grid, hpc::SolverConfig config = {})
      : params_(params), grid_(std::move(grid)), config_(config) {
    config_.validate();
  }

  const ModelParams& params() const { return params_; }
  const Grid& grid() const { return grid_; }

  KsState make_state() const { return KsState(grid_, params_); }

  /// Delta(G1(rho)(rho - rho_bar)) - mu div((rho - rho_bar) grad phi).
  SpectralField nonlinear_rhs(const KsState& s) const {
    const SpectralField rho = maybe_dealias(s.rho);
    const std::size_t size = grid_.size();
    const int d = grid_.dim();
    const auto rx = rho.to_physical();
    const auto gphi = spectral::gradient(solve_phi(rho, params_)).to_physical();
    std::vector<double> pi(size), flux(size * d);
    for (std::size_t i = 0; i < size; ++i) {
      const double dev = rx[i] - params_.rho_bar();
      pi[i] = G1_eval(rx[i], params_) * dev;
      for (int a = 0; a < d; ++a) flux[a * size + i] = dev * gphi[a * size + i];
    }
    SpectralField out = spectral::laplacian(SpectralField::from_physical(grid_, pi, 1));
    out -= params_.mu() * spectral::divergence(SpectralField::from_physical(grid_, flux, d));
    return maybe_dealias(out);
  }

  KsState linear_step(const KsState& s, double h) const {
    KsState out = s;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      out.rho(0, i) = std::exp(h * ks_symbol(grid_.wavenumber(i), params_)) * s.rho(0, i);
    }
    out.tau = s.tau + h;
    return out;
  }

  KsState step(const KsState& s, double h) const {
    if (!(h > 0.0)) throw std::invalid_argument("step needs h > 0");
    const SpectralField n0 = nonlinear_rhs(s);
    KsState a = s;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      const double z = h * ks_symbol(grid_.wavenumber(i), params_);
      a.rho(0, i) = std::exp(z) * s.rho(0, i) + h * linear::phi1(z).real() * n0(0, i);
    }
    const SpectralField n1 = nonlinear_rhs(a);
    KsState out = a;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      const double z = h * ks_symbol(grid_.wavenumber(i), params_);
      out.rho(0, i) += h * linear::phi2(z).real() * (n1(0, i) - n0(0, i));
      if (grid_.is_nyquist(i)) out.rho(0, i) = 0.0;
    }
    out.tau = s.tau + h;
    return out;
  }

  KsSeriesRow measure(const KsState& s) const {
    KsSeriesRow r;
    r.tau = s.tau;
    r.mass = s.rho.mean().real() * grid_.volume();
    const auto blocks = spectral::block_norms(s.rho);
    const double half = grid_.dim() / 2.0;
    r.low = spectral::besov_norm(blocks, half, spectral::Summability::one);
    r.high = spectral::besov_norm(blocks, half + 2.0, spectral::Summability::one);
    return r;
  }

  KsTrajectory run(KsState state) const {
    KsTrajectory traj;
    state.rho.zero_nyquist();
    state.rho.enforce_real();
    const KsSeriesRow first = measure(state);
    traj.series.push_back(first);
    if (config_.keep_snapshots) traj.snapshots.push_back(state);
    const double t0 = state.tau;
    const long intervals = static_cast<long>(std::ceil((config_.t_end - 1e-12) / config_.snapshot_every));
    try {
      for (long k = 1; k <= intervals; ++k) {
        const double target = std::min(t0 + k * config_.snapshot_every, t0 + config_.t_end);
        const double span = target - state.tau;
        const long sub = std::max(1L, static_cast<long>(std::ceil(span / config_.dt - 1e-9)));
        const double h = span / static_cast<double>(sub);
        for (long i = 0; i < sub; ++i) {
          state = step(state, h);
          if (!state.rho.all_finite()) throw BlowUp("non-finite coefficients at tau = " + std::to_string(state.tau));
        }
        state.tau = target;
        const KsSeriesRow row = measure(state);
        traj.series.push_back(row);
        if (config_.keep_snapshots) traj.snapshots.push_back(state);
        if (first.low > 0.0 && row.low > config_.blowup_factor * first.low) {
          throw BlowUp("norm grew beyond " + std::to_string(config_.blowup_factor) + " x initial");
        }
      }
    } catch (const WindowViolation& e) {
      traj.blew_up = true;
      traj.blowup_time = state.tau;
      traj.blowup_reason = e.what();
    } catch (const BlowUp& e) {
      traj.blew_up = true;
      traj.blowup_time = state.tau;
      traj.blowup_reason = e.what();
    }
    return traj;
  }

 private:
  SpectralField maybe_dealias(const SpectralField& f) const {
    return config_.dealias ? spectral::dealias(f) : f;
  }

  ModelParams params_;
  Grid grid_;
  hpc::SolverConfig config_;
};

}  // namespace hpclab::ks
