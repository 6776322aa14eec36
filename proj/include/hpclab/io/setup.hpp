#pragma once

#include <string>

#include "hpclab/diagnostics/relaxation.hpp"
#include "hpclab/hpc/initial_data.hpp"
#include "hpclab/io/config.hpp"
#include "hpclab/linear/decay_study.hpp"

namespace hpclab::io {

/// Builders from a flat config. The model block (eps, mu, a, b, rho_bar) is
/// required; other missing keys take defaults. Invalid values raise
/// ConfigError naming the key.

inline model::PressureLaw pressure_from(const Config& c) {
  const std::string law = c.get_string("model.pressure", "gamma");
  const double kappa = c.get_double("model.kappa", 1.0);
  try {
    if (law == "isothermal") return model::PressureLaw::isothermal(kappa);
    if (law == "gamma") return model::PressureLaw::gamma_law(kappa, c.get_double("model.gamma", 2.0));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model.pressure: ") + e.what());
  }
  throw ConfigError("model.pressure must be 'gamma' or 'isothermal', got '" + law + "'");
}

inline model::ModelParams params_from(const Config& c) {
  const auto law = pressure_from(c);
  try {
    return model::ModelParams(c.require_double("model.eps"), c.require_double("model.mu"),
                              c.require_double("model.a"), c.require_double("model.b"),
                              c.require_double("model.rho_bar"), law, c.get_int("model.threshold_offset", -2));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

inline spectral::Grid grid_from(const Config& c) {
  try {
    return spectral::Grid(c.get_int("grid.dim", 1), c.get_int("grid.points", 256),
                          c.get_double("grid.length", 16.0 * std::numbers::pi));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

inline hpc::SolverConfig solver_from(const Config& c) {
  hpc::SolverConfig s;
  s.dt = c.get_double("solver.dt", s.dt);
  s.t_end = c.get_double("solver.t_end", s.t_end);
  s.snapshot_every = c.get_double("solver.snapshot_every", s.snapshot_every);
  s.dealias = c.get_bool("solver.dealias", s.dealias);
  s.cfl = c.get_double("solver.cfl", s.cfl);
  s.max_halvings = c.get_int("solver.max_halvings", s.max_halvings);
  s.blowup_factor = c.get_double("solver.blowup_factor", s.blowup_factor);
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("solver: ") + e.what());
  }
  return s;
}

inline hpc::InitialProfile profile_from(const Config& c) {
  hpc::InitialProfile p;
  p.target = c.get_double("initial.target", p.target);
  p.width = c.get_double("initial.width", p.width);
  p.velocity_ratio = c.get_double("initial.velocity_ratio", p.velocity_ratio);
  p.center = c.get_list("initial.center", {});
  const std::string psi = c.get_string("initial.psi", "well_prepared");
  if (psi == "well_prepared") {
    p.psi = hpc::PsiChoice::well_prepared;
  } else if (psi == "zero") {
    p.psi = hpc::PsiChoice::zero;
  } else {
    throw ConfigError("initial.psi must be 'well_prepared' or 'zero', got '" + psi + "'");
  }
  if (!(p.target >= 0.0)) throw ConfigError("initial.target must be nonnegative");
  if (!(p.width > 0.0)) throw ConfigError("initial.width must be positive");
  return p;
}

inline linear::DecayStudyConfig decay_from(const Config& c, int dim) {
  linear::DecayStudyConfig d;
  d.dim = dim;
  d.sigma0 = c.get_double("decay.sigma0", -dim / 2.0);
  d.sigma = c.get_double("decay.sigma", dim / 2.0);
  d.window_lo = c.get_double("decay.window_lo", d.window_lo);
  d.window_hi = c.get_double("decay.window_hi", d.window_hi);
  d.horizon = c.get_double("decay.horizon", d.horizon);
  d.samples = c.get_int("decay.samples", d.samples);
  d.j_lo = c.get_int("decay.j_lo", d.j_lo);
  d.j_hi = c.get_int("decay.j_hi", d.j_hi);
  d.panels = c.get_int("decay.panels", d.panels);
  const std::string q = c.get_string("decay.quantity", "full");
  if (q == "full") {
    d.quantity = linear::DecayQuantity::full;
  } else if (q == "damped") {
    d.quantity = linear::DecayQuantity::damped;
  } else {
    throw ConfigError("decay.quantity must be 'full' or 'damped', got '" + q + "'");
  }
  const std::string r = c.get_string("decay.summability", "1");
  if (r == "1") {
    d.summability = spectral::Summability::one;
  } else if (r == "inf") {
    d.summability = spectral::Summability::infinity;
  } else {
    throw ConfigError("decay.summability must be '1' or 'inf', got '" + r + "'");
  }
  try {
    linear::validate(d);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("decay: ") + e.what());
  }
  return d;
}

inline diagnostics::RelaxationConfig relaxation_from(const Config& c) {
  diagnostics::RelaxationConfig r;
  r.epsilons = c.get_list("relax.epsilons", r.epsilons);
  r.tau_end = c.get_double("relax.tau_end", r.tau_end);
  r.tau_snapshot = c.get_double("relax.tau_snapshot", r.tau_snapshot);
  r.hpc_dt = c.get_double("relax.hpc_dt", r.hpc_dt);
  r.ks_dt = c.get_double("relax.ks_dt", r.ks_dt);
  r.amplitude = c.get_double("relax.amplitude", r.amplitude);
  r.width = c.get_double("relax.width", r.width);
  r.slope_lo = c.get_double("relax.slope_lo", r.slope_lo);
  r.slope_hi = c.get_double("relax.slope_hi", r.slope_hi);
  if (r.epsilons.size() < 3) {
    throw ConfigError("relax.epsilons needs at least three values to define a slope, got " +
                      std::to_string(r.epsilons.size()));
  }
  for (double e : r.epsilons) {
    if (!(e > 0.0 && e < 1.0)) throw ConfigError("relax.epsilons entries must lie in (0, 1)");
  }
  if (!(r.tau_end > 0.0 && r.tau_snapshot > 0.0 && r.hpc_dt > 0.0 && r.ks_dt > 0.0)) {
    throw ConfigError("relax: times and steps must be positive");
  }
  if (!(r.amplitude > 0.0 && r.width > 0.0)) throw ConfigError("relax: amplitude and width must be positive");
  return r;
}

}  // namespace hpclab::io
