#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hpclab/errors.hpp"
#include "hpclab/hpc/state.hpp"
#include "hpclab/linear/propagator.hpp"
#include "hpclab/spectral/multiplier.hpp"

namespace hpclab::hpc {

using spectral::cplx;

struct SolverConfig {
  double dt = 0.01;
  double t_end = 1.0;
  bool dealias = true;
  double snapshot_every = 0.1;
  double cfl = 0.5;
  int max_halvings = 12;
  bool keep_snapshots = true;
  double blowup_factor = 1e3;

  void validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be nonnegative");
    if (!(snapshot_every > 0.0)) throw std::invalid_argument("snapshot cadence must be positive");
    if (!(cfl > 0.0)) throw std::invalid_argument("CFL factor must be positive");
  }
};

/// One row of the diagnostic series; psi_high is the high part of grad psi.
struct SeriesRow {
  double t = 0.0;
  double mass = 0.0;
  double n_low = 0.0, n_high = 0.0;
  double u_low = 0.0, u_high = 0.0;
  double psi_low = 0.0, psi_high = 0.0;
  double aggregate = 0.0;
};

struct HpcTrajectory {
  std::vector<HpcState> snapshots;
  std::vector<SeriesRow> series;
  bool blew_up = false;
  double blowup_time = 0.0;
  std::string blowup_reason;
};

/// Triple of fields (n, u, psi) used for right-hand sides.
struct Triple {
  SpectralField n;
  SpectralField u;
  SpectralField psi;
};

/// Exponential-integrator solver: the coupled linear symbol is applied exactly
/// per mode, the quadratic remainder explicitly (ETDRK2).
class HpcSolver {
 public:
  HpcSolver(ModelParams params, Grid grid, SolverConfig config = {})
      : params_(params), grid_(std::move(grid)), config_(config), cache_(std::make_shared<Cache>()) {
    config_.validate();
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      cache_->slot.emplace(grid_.mode_norm2(i), 0);
    }
    std::size_t k = 0;
    for (auto& [n2, s] : cache_->slot) s = k++;
  }

  const ModelParams& params() const { return params_; }
  const Grid& grid() const { return grid_; }
  const SolverConfig& config() const { return config_; }

  HpcState make_state() const { return HpcState(grid_, params_); }

  /// N_n = -u.grad n - G(n) div u, N_u = -u.grad u, N_psi = H(n).
  Triple nonlinear_rhs(const HpcState& s) const {
    const SpectralField n = maybe_dealias(s.n);
    const SpectralField u = maybe_dealias(s.u);
    const int d = grid_.dim();
    const std::size_t size = grid_.size();
    const auto nx = n.to_physical();
    const auto ux = u.to_physical();
    const auto gn = spectral::gradient(n).to_physical();
    const auto du = spectral::divergence(u).to_physical();
    std::vector<std::vector<double>> gu(d);
    for (int a = 0; a < d; ++a) gu[a] = spectral::partial(u, a).to_physical();

    std::vector<double> rn(size), ru(size * d), rp(size);
    for (std::size_t i = 0; i < size; ++i) {
      double adv = 0.0;
      for (int a = 0; a < d; ++a) adv += ux[a * size + i] * gn[a * size + i];
      rn[i] = -adv - model::coefficient_G(nx[i], params_) * du[i];
      rp[i] = model::coefficient_H(nx[i], params_);
      for (int c = 0; c < d; ++c) {
        double acc = 0.0;
        for (int a = 0; a < d; ++a) acc += ux[a * size + i] * gu[a][c * size + i];
        ru[c * size + i] = -acc;
      }
    }
    return {maybe_dealias(SpectralField::from_physical(grid_, rn, 1)),
            maybe_dealias(SpectralField::from_physical(grid_, ru, d)),
            maybe_dealias(SpectralField::from_physical(grid_, rp, 1))};
  }

  /// Exact linear flow over h.
  HpcState linear_step(const HpcState& s, double h) const {
    HpcState out = s;
    const Triple x{s.n, s.u, s.psi};
    combine(propagators(h), x, nullptr, nullptr, out);
    out.t = s.t + h;
    return out;
  }

  /// One ETDRK2 step of length h (no CFL control).
  HpcState step(const HpcState& s, double h) const {
    if (!(h > 0.0)) throw std::invalid_argument("step needs h > 0");
    const auto& ops = propagators(h);
    const Triple x{s.n, s.u, s.psi};
    const Triple nx = nonlinear_rhs(s);
    HpcState a = s;
    combine(ops, x, &nx, nullptr, a);
    const Triple na = nonlinear_rhs(a);
    const Triple diff{na.n - nx.n, na.u - nx.u, na.psi - nx.psi};
    HpcState out = s;
    combine(ops, x, &nx, &diff, out);
    out.t = s.t + h;
    return out;
  }

  /// Largest |u| over grid points.
  double max_speed(const HpcState& s) const {
    const auto ux = s.u.to_physical();
    const std::size_t size = grid_.size();
    double m = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
      double v = 0.0;
      for (int a = 0; a < grid_.dim(); ++a) v += ux[a * size + i] * ux[a * size + i];
      m = std::max(m, std::sqrt(v));
    }
    return m;
  }

  SeriesRow measure(const HpcState& s) const {
    const auto b = hybrid_breakdown(s);
    SeriesRow r;
    r.t = s.t;
    r.mass = total_mass(s.n, params_);
    r.n_low = b.n_low;
    r.n_high = b.n_high;
    r.u_low = b.u_low;
    r.u_high = b.u_high;
    r.psi_low = b.psi_low;
    r.psi_high = b.grad_psi_high;
    r.aggregate = b.aggregate;
    return r;
  }

  /// Integrate to t_end, recording snapshots and the series at each cadence
  /// point. Window exits and runaway growth end the run with a blow-up report.
  HpcTrajectory run(HpcState state) const {
    HpcTrajectory traj;
    clean(state);
    const SeriesRow first = measure(state);
    traj.series.push_back(first);
    if (config_.keep_snapshots) traj.snapshots.push_back(state);
    const double t0 = state.t;
    const long intervals = static_cast<long>(std::ceil((config_.t_end - 1e-12) / config_.snapshot_every));
    try {
      for (long k = 1; k <= intervals; ++k) {
        const double target = std::min(t0 + k * config_.snapshot_every, t0 + config_.t_end);
        const double span = target - state.t;
        const long sub = std::max(1L, static_cast<long>(std::ceil(span / config_.dt - 1e-9)));
        const double h = span / static_cast<double>(sub);
        for (long i = 0; i < sub; ++i) state = advance(state, h, 0);
        state.t = target;
        const SeriesRow row = measure(state);
        traj.series.push_back(row);
        if (config_.keep_snapshots) traj.snapshots.push_back(state);
        if (first.aggregate > 0.0 && row.aggregate > config_.blowup_factor * first.aggregate) {
          throw BlowUp("hybrid aggregate grew beyond " + std::to_string(config_.blowup_factor) + " x initial");
        }
      }
    } catch (const WindowViolation& e) {
      traj.blew_up = true;
      traj.blowup_time = state.t;
      traj.blowup_reason = e.what();
    } catch (const BlowUp& e) {
      traj.blew_up = true;
      traj.blowup_time = state.t;
      traj.blowup_reason = e.what();
    }
    return traj;
  }

  /// Drop Nyquist modes and restore exact conjugate symmetry.
  static void clean(HpcState& s) {
    for (SpectralField* f : {&s.n, &s.u, &s.psi}) {
      f->zero_nyquist();
      f->enforce_real();
    }
  }

 private:
  struct Cache {
    std::map<long, std::size_t> slot;
    std::mutex mutex;
    std::map<double, std::vector<linear::ModePropagator>> by_step;
  };

  HpcState advance(const HpcState& s, double h, int depth) const {
    if (max_speed(s) * h > config_.cfl * grid_.spacing()) {
      if (depth >= config_.max_halvings) throw BlowUp("CFL restriction not met after repeated halving");
      return advance(advance(s, 0.5 * h, depth + 1), 0.5 * h, depth + 1);
    }
    HpcState next = step(s, h);
    if (!next.n.all_finite() || !next.u.all_finite() || !next.psi.all_finite()) {
      throw BlowUp("non-finite coefficients at t = " + std::to_string(next.t));
    }
    return next;
  }

  SpectralField maybe_dealias(const SpectralField& f) const {
    return config_.dealias ? spectral::dealias(f) : f;
  }

  const std::vector<linear::ModePropagator>& propagators(double h) const {
    std::lock_guard lock(cache_->mutex);
    auto it = cache_->by_step.find(h);
    if (it != cache_->by_step.end()) return it->second;
    if (cache_->by_step.size() > 64) cache_->by_step.clear();
    std::vector<linear::ModePropagator> ops(cache_->slot.size());
    const double k0 = grid_.base_wavenumber();
    for (const auto& [n2, s] : cache_->slot) {
      ops[s] = linear::mode_propagator(k0 * std::sqrt(static_cast<double>(n2)), h, params_);
    }
    return cache_->by_step.emplace(h, std::move(ops)).first->second;
  }

  /// out = E x + F1 y + F2 z mode by mode, with (n, m, psi) as the compressible
  /// coordinates and the transverse part of u propagated by the scalar block.
  void combine(const std::vector<linear::ModePropagator>& ops, const Triple& x, const Triple* y, const Triple* z,
               HpcState& out) const {
    const int d = grid_.dim();
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      if (grid_.is_nyquist(i)) {
        out.n(0, i) = 0.0;
        out.psi(0, i) = 0.0;
        for (int a = 0; a < d; ++a) out.u(a, i) = 0.0;
        continue;
      }
      const auto& op = ops[cache_->slot.at(grid_.mode_norm2(i))];
      const double k = grid_.wavenumber(i);
      if (k == 0.0) {
        std::array<cplx, 3> acc{};
        auto add0 = [&](const Eigen::Matrix3d& M, const Triple& t) {
          acc[0] += M(0, 0) * t.n(0, i);
          acc[2] += M(2, 0) * t.n(0, i) + M(2, 2) * t.psi(0, i);
        };
        add0(op.exp, x);
        if (y) add0(op.phi1, *y);
        if (z) add0(op.phi2, *z);
        out.n(0, i) = acc[0];
        out.psi(0, i) = acc[2];
        for (int a = 0; a < d; ++a) {
          cplx v = op.exp(1, 1) * x.u(a, i);
          if (y) v += op.phi1(1, 1) * y->u(a, i);
          if (z) v += op.phi2(1, 1) * z->u(a, i);
          out.u(a, i) = v;
        }
        continue;
      }
      const auto xi = grid_.wavevector(i);
      std::array<double, 3> dir{};
      for (int a = 0; a < d; ++a) dir[a] = xi[a] / k;
      Eigen::Vector3cd comp = Eigen::Vector3cd::Zero();
      std::array<cplx, 3> trans{};
      auto add = [&](const Eigen::Matrix3d& M, double s, const Triple& t) {
        cplx proj = 0.0;
        for (int a = 0; a < d; ++a) proj += dir[a] * t.u(a, i);
        const Eigen::Vector3cd v(t.n(0, i), cplx(0.0, 1.0) * proj, t.psi(0, i));
        comp += M.cast<cplx>() * v;
        for (int a = 0; a < d; ++a) trans[a] += s * (t.u(a, i) - dir[a] * proj);
      };
      add(op.exp, op.inc_exp, x);
      if (y) add(op.phi1, op.inc_phi1, *y);
      if (z) add(op.phi2, op.inc_phi2, *z);
      out.n(0, i) = comp(0);
      out.psi(0, i) = comp(2);
      for (int a = 0; a < d; ++a) out.u(a, i) = cplx(0.0, -1.0) * dir[a] * comp(1) + trans[a];
    }
  }

  ModelParams params_;
  Grid grid_;
  SolverConfig config_;
  std::shared_ptr<Cache> cache_;
};

}  // namespace hpclab::hpc
