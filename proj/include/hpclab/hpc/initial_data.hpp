#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hpclab/hpc/solver.hpp"

namespace hpclab::hpc {

enum class PsiChoice {
  well_prepared,  // psi0 = (b - Delta)^{-1}(c1 n0 + H(n0))
  zero,
};

/// Localized Gaussian data scaled to a prescribed hybrid size X0.
struct InitialProfile {
  double target = 0.01;
  double width = 1.0;
  std::vector<double> center;  // defaults to the box centre
  double velocity_ratio = 0.0;  // u0 along the first axis, relative to n0's shape
  PsiChoice psi = PsiChoice::well_prepared;
};

struct InitialData {
  HpcState state;
  HybridBreakdown breakdown;
  double scale = 0.0;
};

/// Periodic Gaussian exp(-|x - c|^2 / (2 w^2)) using the nearest image.
inline SpectralField periodic_gaussian(const Grid& g, double width, std::vector<double> center) {
  if (center.empty()) center.assign(g.dim(), 0.5 * g.length());
  if (static_cast<int>(center.size()) != g.dim()) throw std::invalid_argument("centre has wrong dimension");
  const double L = g.length();
  return SpectralField::from_function(g, [&](std::span<const double> x) {
    double r2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      double dx = x[a] - center[a];
      dx -= L * std::round(dx / L);
      r2 += dx * dx;
    }
    return std::exp(-0.5 * r2 / (width * width));
  });
}

/// Well-prepared concentration (b - Delta)^{-1}(c1 n + H(n)) = a (b - Delta)^{-1}(rho - rho_bar).
inline SpectralField well_prepared_psi(const SpectralField& n, const ModelParams& p) {
  auto x = n.to_physical();
  for (auto& v : x) v = p.c1() * v + model::coefficient_H(v, p);
  return spectral::bessel_inverse(SpectralField::from_physical(n.grid(), x, 1), p.b());
}

namespace detail {

inline HpcState scaled_state(const SpectralField& shape, double scale, const InitialProfile& prof,
                             const ModelParams& p) {
  const Grid& g = shape.grid();
  HpcState s(g, p);
  s.n = scale * shape;
  if (prof.velocity_ratio != 0.0) s.u.assign_component(0, (scale * prof.velocity_ratio) * shape);
  if (prof.psi == PsiChoice::well_prepared) s.psi = well_prepared_psi(s.n, p);
  HpcSolver::clean(s);
  return s;
}

}  // namespace detail

/// Scale the profile so that the measured hybrid aggregate equals the target.
inline InitialData build_initial_data(const InitialProfile& prof, const ModelParams& p, const Grid& g) {
  if (!(prof.target >= 0.0)) throw std::invalid_argument("target size must be nonnegative");
  if (!(prof.width > 0.0)) throw std::invalid_argument("profile width must be positive");
  const SpectralField shape = periodic_gaussian(g, prof.width, prof.center);
  if (prof.target == 0.0) {
    HpcState s(g, p);
    return {s, hybrid_breakdown(s), 0.0};
  }
  auto size_at = [&](double scale) { return hybrid_breakdown(detail::scaled_state(shape, scale, prof, p)).aggregate; };
  const double probe = 1e-6;
  const double unit = size_at(probe) / probe;
  if (!(unit > 0.0)) throw std::invalid_argument("profile has zero hybrid size; cannot reach a nonzero target");

  double s0 = prof.target / unit;
  double f0 = size_at(s0) - prof.target;
  double s1 = s0 * (1.0 - f0 / prof.target);
  double f1 = size_at(s1) - prof.target;
  for (int it = 0; it < 50 && std::abs(f1) > 1e-14 * prof.target && f1 != f0; ++it) {
    const double s2 = s1 - f1 * (s1 - s0) / (f1 - f0);
    s0 = s1;
    f0 = f1;
    s1 = s2;
    f1 = size_at(s1) - prof.target;
  }
  HpcState s = detail::scaled_state(shape, s1, prof, p);
  return {s, hybrid_breakdown(s), s1};
}

}  // namespace hpclab::hpc
