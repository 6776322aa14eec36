#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hpclab/ks/solver.hpp"

using namespace hpclab;
using namespace hpclab::ks;
using model::PressureLaw;

namespace {

constexpr double kPi = std::numbers::pi;

ModelParams params(double gamma = 2.0, double kappa = 1.0, double a = 1.0, double mu = 1.0, double b = 1.0,
                   double rho_bar = 1.0) {
  return ModelParams(0.1, mu, a, b, rho_bar, PressureLaw::gamma_law(kappa, gamma));
}

hpc::SolverConfig config(double dt, double t_end, double every) {
  hpc::SolverConfig c;
  c.dt = dt;
  c.t_end = t_end;
  c.snapshot_every = every;
  return c;
}

SpectralField bump(const Grid& g, double rho_bar, double amp, double width = 1.0) {
  const double c = 0.5 * g.length();
  auto f = SpectralField::from_function(g, [&](std::span<const double> x) {
    double r2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) r2 += (x[a] - c) * (x[a] - c);
    return rho_bar + amp * std::exp(-0.5 * r2 / (width * width));
  });
  f.zero_nyquist();
  return f;
}

SpectralField random_field(const Grid& g, double mean, double amp, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(g.size());
  for (auto& v : x) v = u(rng);
  auto f = spectral::dealias(SpectralField::from_physical(g, x, 1));
  f *= amp / std::max(1e-300, f.max_abs_coefficient());
  f(0, 0) = mean;
  return f;
}

}  // namespace

TEST(KsSymbol, Examples) {
  const auto p = params();
  EXPECT_DOUBLE_EQ(ks_symbol(1.0, p), -1.5);
  EXPECT_EQ(ks_symbol(0.0, p), 0.0);
}

TEST(KsSymbol, BoundedByStabilityMargin) {
  const auto p = params(2.0, 1.0, 1.0, 1.5, 1.0);
  const double margin = p.stability_margin();
  ASSERT_GT(margin, 0.0);
  for (int i = 0; i <= 1000; ++i) {
    const double xi = 0.02 * i;
    EXPECT_LE(ks_symbol(xi, p), -margin * xi * xi + 1e-14);
  }
}

TEST(KsG1, Examples) {
  const auto p = params();
  EXPECT_NEAR(G1_eval(1.2, p), 0.2, 1e-15);
  EXPECT_EQ(G1_eval(1.0, p), 0.0);
  EXPECT_THROW(G1_eval(2.5, p), WindowViolation);
  EXPECT_NEAR(G1_eval(1.0, ModelParams(0.1, 1, 1, 1, 1, PressureLaw::isothermal(2.0))), 0.0, 1e-15);
}

TEST(KsG1, ContinuousAcrossBranchSwitch) {
  for (double gamma : {1.4, 2.0, 3.0}) {
    const auto p = params(gamma, 1.0, 1.0, 1.0, 1.0, 1.3);
    for (double side : {-1.0, 1.0}) {
      const double edge = 1.3 + side * 1e-6 * 1.3;
      const double inner = G1_eval(std::nextafter(edge, 1.3), p);
      const double outer = G1_eval(std::nextafter(edge, side * 10.0), p);
      EXPECT_LE(std::abs(inner - outer), 1e-12) << "gamma " << gamma;
    }
  }
}

TEST(KsG1, MatchesDifferenceQuotientAwayFromEquilibrium) {
  const auto p = params(3.0, 0.7);
  const auto& P = p.pressure();
  for (double rho : {0.6, 0.9, 1.1, 1.8}) {
    EXPECT_NEAR(G1_eval(rho, p), (P.pressure(rho) - P.pressure(1.0)) / (rho - 1.0) - P.derivative(1.0), 1e-13);
  }
}

TEST(KsPhi, EquilibriumAndSingleMode) {
  const Grid g(1, 32, 2 * kPi);
  const auto p = params(2.0, 1.0, 2.0, 1.0, 3.0, 1.5);
  KsState s(g, p);
  const auto phi = solve_phi(s.rho, p);
  EXPECT_NEAR(phi.mean().real(), p.phi_bar(), 1e-15);
  for (double v : phi.to_physical()) EXPECT_NEAR(v, 1.0, 1e-15);

  const double A = 0.01;
  auto rho = SpectralField::from_function(g, [&](std::span<const double> x) { return 1.5 + A * std::cos(3 * x[0]); });
  const auto f = solve_phi(rho, p);
  const std::size_t idx = g.index_of(std::array<int, 1>{3});
  EXPECT_NEAR(2.0 * f(0, idx).real(), 2.0 * A / (3.0 + 9.0), 1e-16);
}

TEST(KsPhi, ResidualOnRandomField) {
  const Grid g(2, 32, 4 * kPi);
  const auto p = params(2.0, 1.0, 1.7, 1.0, 0.6);
  const auto rho = random_field(g, 1.0, 0.05, 7);
  const auto phi = solve_phi(rho, p);
  const auto residual = p.b() * phi - spectral::laplacian(phi) - p.a() * rho;
  EXPECT_LE(residual.max_abs_coefficient(), 1e-10);
}

TEST(KsVelocity, EquilibriumIsAtRest) {
  const Grid g(2, 16, 2 * kPi);
  const auto p = params();
  KsState s(g, p);
  const auto u = reconstruct_velocity(s.rho, solve_phi(s.rho, p), p);
  EXPECT_LE(u.max_abs_coefficient(), 1e-16);
}

TEST(KsVelocity, LinearSingleMode) {
  const Grid g(1, 32, 2 * kPi);
  const auto p = params(2.0, 1.0, 1.0, 0.8, 1.0);
  const double A = 1e-6;
  auto rho = SpectralField::from_function(g, [&](std::span<const double> x) { return 1.0 + A * std::cos(2 * x[0]); });
  const auto phi = solve_phi(rho, p);
  const auto u = reconstruct_velocity(rho, phi, p);
  const std::size_t idx = g.index_of(std::array<int, 1>{2});
  const cplx ik(0.0, 2.0);
  const cplx expect = (-p.c0() * ik * rho(0, idx) + p.mu() * p.rho_bar() * ik * phi(0, idx)) / p.rho_bar();
  EXPECT_NEAR(std::abs(u(0, idx) - expect), 0.0, 1e-6 * std::abs(expect));
}

TEST(KsVelocity, RejectsDensityOutsideWindow) {
  const Grid g(1, 16, 2 * kPi);
  const auto p = params();
  const auto rho = bump(g, 1.0, 2.0, 0.5);
  EXPECT_THROW(reconstruct_velocity(rho, solve_phi(rho, p), p), WindowViolation);
}

TEST(KsSolver, NonlinearRhsPlusLinearEqualsConservativeForm) {
  // rho_tau = Delta P(rho) - mu div(rho grad phi) written out directly.
  const Grid g(1, 64, 8 * kPi);
  const auto p = params(3.0, 0.8, 1.2, 0.7, 1.1);
  hpc::SolverConfig c;
  c.dealias = false;
  KsSolver solver(p, g, c);
  KsState s(g, p);
  s.rho = bump(g, 1.0, 0.2, 2.0);
  const auto N = solver.nonlinear_rhs(s);
  SpectralField lhs = N;
  for (std::size_t i = 0; i < g.size(); ++i) lhs(0, i) += ks_symbol(g.wavenumber(i), p) * s.rho(0, i);

  const auto rx = s.rho.to_physical();
  std::vector<double> px(rx.size()), flux(rx.size());
  const auto gphi = spectral::gradient(solve_phi(s.rho, p)).to_physical();
  for (std::size_t i = 0; i < rx.size(); ++i) {
    px[i] = p.pressure().pressure(rx[i]);
    flux[i] = rx[i] * gphi[i];
  }
  const auto direct = spectral::laplacian(SpectralField::from_physical(g, px, 1)) -
                      p.mu() * spectral::divergence(SpectralField::from_physical(g, flux, 1));
  auto diff = lhs - direct;
  diff.zero_nyquist();
  EXPECT_LE(diff.max_abs_coefficient(), 1e-13);
}

TEST(KsSolver, EquilibriumIsFixedPoint) {
  const Grid g(1, 32, 16 * kPi);
  const auto p = params();
  KsSolver solver(p, g, config(0.01, 1.0, 0.5));
  const auto traj = solver.run(solver.make_state());
  ASSERT_FALSE(traj.blew_up);
  for (const auto& s : traj.snapshots) {
    EXPECT_EQ(s.rho(0, 0).real(), 1.0);
    double off = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) off = std::max(off, std::abs(s.rho(0, i)));
    EXPECT_EQ(off, 0.0);
  }
}

TEST(KsSolver, LinearRegimeDecayFactors) {
  const Grid g(1, 64, 16 * kPi);
  const auto p = params();
  const double T = 0.5;
  KsSolver solver(p, g, config(0.01, T, T));
  KsState s(g, p);
  s.rho = bump(g, 1.0, 1e-8);
  const auto traj = solver.run(s);
  const auto& end = traj.snapshots.back();
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const cplx expect = std::exp(T * ks_symbol(g.wavenumber(i), p)) * traj.snapshots.front().rho(0, i);
    worst = std::max(worst, std::abs(end.rho(0, i) - expect));
  }
  EXPECT_LE(worst, 1e-10 * 1e-8);
}

TEST(KsSolver, MassConservedAndNormBounded) {
  const Grid g(1, 128, 16 * kPi);
  const auto p = params(3.0);
  KsSolver solver(p, g, config(0.005, 5.0, 0.25));
  KsState s(g, p);
  s.rho = bump(g, 1.0, 0.05);
  const auto traj = solver.run(s);
  ASSERT_FALSE(traj.blew_up);
  const auto& first = traj.series.front();
  for (const auto& r : traj.series) {
    EXPECT_LE(std::abs(r.mass - first.mass) / first.mass, 1e-12);
    EXPECT_LE(r.low, 10.0 * first.low);
  }
  EXPECT_LT(traj.series.back().low, first.low);
}

TEST(KsSolver, ContinuityEquationHoldsAlongRun) {
  const Grid g(1, 128, 16 * kPi);
  const auto p = params(2.0, 1.0, 1.0, 0.7, 1.0);
  const double h = 1e-3;
  KsSolver solver(p, g, config(h / 4, 3 * h, h));
  KsState s(g, p);
  s.rho = bump(g, 1.0, 0.1, 2.0);
  const auto traj = solver.run(s);
  ASSERT_EQ(traj.snapshots.size(), 4u);
  const auto& mid = traj.snapshots[1].rho;
  const auto dt_rho = (1.0 / (2 * h)) * (traj.snapshots[2].rho - traj.snapshots[0].rho);
  const auto u = reconstruct_velocity(mid, solve_phi(mid, p), p);
  const auto rx = mid.to_physical();
  auto ux = u.to_physical();
  for (std::size_t i = 0; i < ux.size(); ++i) ux[i] *= rx[i];
  const auto residual = dt_rho + spectral::dealias(spectral::divergence(SpectralField::from_physical(g, ux, 1)));
  EXPECT_LE(residual.max_abs_coefficient(), 1e-5 * dt_rho.max_abs_coefficient());
}

TEST(KsSolver, SecondOrderSelfConvergence) {
  const Grid g(1, 64, 8 * kPi);
  const auto p = params(3.0);
  KsState s(g, p);
  s.rho = bump(g, 1.0, 0.2, 1.5);
  auto at = [&](double dt) { return KsSolver(p, g, config(dt, 1.0, 1.0)).run(s).snapshots.back().rho; };
  const auto ref = at(0.05 / 8);
  const double e1 = (at(0.05) - ref).max_abs_coefficient();
  const double e2 = (at(0.025) - ref).max_abs_coefficient();
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.5);
}
