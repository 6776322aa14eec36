#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hpclab/errors.hpp"
#include "hpclab/model/params.hpp"

namespace hpclab::linear {

using cplx = std::complex<double>;
using model::ModelParams;

/// Linearized symbol at |xi|: compressible block on (n, m, psi) with
/// m = Lambda^{-1} div u, and the incompressible scalar -1/eps.
struct SymbolMatrix {
  double xi = 0.0;
  Eigen::Matrix3d compressible;
  double incompressible = 0.0;
};

inline SymbolMatrix symbol_matrix(double xi, const ModelParams& p) {
  if (!(xi >= 0.0)) throw std::invalid_argument("symbol needs |xi| >= 0");
  SymbolMatrix s;
  s.xi = xi;
  s.compressible << 0.0, -p.c0() * xi, 0.0,
                    xi, -1.0 / p.epsilon(), -p.mu() * xi,
                    p.c1(), 0.0, -p.b() - xi * xi;
  s.incompressible = -1.0 / p.epsilon();
  return s;
}

/// Monic cubic lambda^3 + a2 lambda^2 + a1 lambda + a0.
struct CubicCoefficients {
  double a2 = 0.0;
  double a1 = 0.0;
  double a0 = 0.0;

  cplx operator()(cplx z) const { return ((z + a2) * z + a1) * z + a0; }
  cplx derivative(cplx z) const { return (3.0 * z + 2.0 * a2) * z + a1; }
};

inline CubicCoefficients characteristic_cubic(double xi, const ModelParams& p) {
  const double k2 = xi * xi;
  const double inv_eps = 1.0 / p.epsilon();
  return {inv_eps + p.b() + k2, p.b() * inv_eps + k2 * inv_eps + p.c0() * k2,
          p.c0() * k2 * (k2 + p.b() - p.c1() * p.mu())};
}

/// Roots of the characteristic cubic. With a complex pair, lambda[0] has
/// positive imaginary part and lambda[1] is its conjugate; lambda[2] is real.
/// With three real roots, lambda[0] has the smallest modulus and the other two
/// are matched to -1/eps and -b.
struct EigenTriple {
  std::array<cplx, 3> lambda{};
  std::array<double, 3> residual{};
  bool complex_pair = false;

  double max_real() const {
    return std::max({lambda[0].real(), lambda[1].real(), lambda[2].real()});
  }
};

namespace detail {

inline cplx polish(const CubicCoefficients& c, cplx z) {
  for (int it = 0; it < 3; ++it) {
    const cplx d = c.derivative(z);
    if (d == 0.0) break;
    const cplx next = z - c(z) / d;
    if (!(std::abs(c(next)) < std::abs(c(z)))) break;
    z = next;
  }
  return z;
}

inline double residual_scale(cplx z) { return 1e-9 * (1.0 + std::pow(std::abs(z), 3)); }

}  // namespace detail

inline EigenTriple eigenvalues(double xi, const ModelParams& p) {
  if (!(xi >= 0.0)) throw std::invalid_argument("eigenvalues need |xi| >= 0");
  EigenTriple out;
  if (xi == 0.0) {
    out.lambda = {cplx(0.0), cplx(-1.0 / p.epsilon()), cplx(-p.b())};
    return out;
  }
  const auto c = characteristic_cubic(xi, p);
  Eigen::Matrix3d companion;
  companion << -c.a2, -c.a1, -c.a0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0;
  Eigen::EigenSolver<Eigen::Matrix3d> solver(companion, false);
  if (solver.info() != Eigen::Success) throw NumericalFailure("companion eigensolve failed");
  std::array<cplx, 3> roots;
  for (int i = 0; i < 3; ++i) roots[i] = solver.eigenvalues()[i];

  auto pair_it = std::find_if(roots.begin(), roots.end(), [](cplx z) { return z.imag() > 0.0; });
  if (pair_it != roots.end()) {
    const cplx top = detail::polish(c, *pair_it);
    cplx real_root = 0.0;
    for (const auto& z : roots) {
      if (z.imag() == 0.0) real_root = z;
    }
    real_root = detail::polish(c, cplx(real_root.real(), 0.0));
    out.lambda = {top, std::conj(top), cplx(real_root.real(), 0.0)};
    out.complex_pair = true;
  } else {
    std::array<double, 3> r;
    for (int i = 0; i < 3; ++i) r[i] = detail::polish(c, cplx(roots[i].real(), 0.0)).real();
    std::sort(r.begin(), r.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
    const double t2 = -1.0 / p.epsilon();
    const double t3 = -p.b();
    const bool swap = std::abs(r[1] - t2) + std::abs(r[2] - t3) > std::abs(r[2] - t2) + std::abs(r[1] - t3);
    out.lambda = {cplx(r[0]), cplx(swap ? r[2] : r[1]), cplx(swap ? r[1] : r[2])};
  }
  for (int i = 0; i < 3; ++i) {
    out.residual[i] = std::abs(c(out.lambda[i]));
    if (!(out.residual[i] <= detail::residual_scale(out.lambda[i]))) {
      throw NumericalFailure("cubic root residual " + std::to_string(out.residual[i]) + " at |xi| = " +
                             std::to_string(xi));
    }
  }
  return out;
}

/// Routh-Hurwitz for the monic cubic: all roots in the open left half-plane.
inline bool routh_hurwitz(const CubicCoefficients& c) {
  return c.a2 > 0.0 && c.a1 > 0.0 && c.a0 > 0.0 && c.a2 * c.a1 > c.a0;
}

struct LowFreqRow {
  double xi;
  double ratio1;  // lambda1 / (-margin eps xi^2), or the critical form when margin = 0
  double ratio2;  // lambda2 / (-1/eps)
  double ratio3;  // lambda3 / (-b)
  bool all_real;
  double max_real;
};

inline std::vector<LowFreqRow> lowfreq_asymptotic_check(const ModelParams& p, const std::vector<double>& xis) {
  std::vector<LowFreqRow> rows;
  const double margin = p.stability_margin();
  const bool critical = std::abs(margin) <= 1e-14 * p.c0();
  for (double xi : xis) {
    const auto e = eigenvalues(xi, p);
    LowFreqRow r{xi, std::numeric_limits<double>::quiet_NaN(), e.lambda[1].real() * -p.epsilon(),
                 e.lambda[2].real() / -p.b(), !e.complex_pair, e.max_real()};
    if (xi > 0.0) {
      const double lead = critical ? -p.epsilon() * std::pow(xi, 4) * p.c0() / p.b()
                                   : -margin * p.epsilon() * xi * xi;
      r.ratio1 = e.lambda[0].real() / lead;
    }
    rows.push_back(r);
  }
  return rows;
}

struct HighFreqRow {
  double xi;
  double re_ratio;   // Re lambda1 * 2 eps, compare with -1
  double im_ratio;   // Im lambda1 / (sqrt(c0) xi), compare with 1
  double ratio3;     // lambda3 / (-b - xi^2), compare with 1
  bool complex_pair;
};

inline std::vector<HighFreqRow> highfreq_asymptotic_check(const ModelParams& p, const std::vector<double>& xis) {
  std::vector<HighFreqRow> rows;
  for (double xi : xis) {
    const auto e = eigenvalues(xi, p);
    rows.push_back({xi, e.lambda[0].real() * 2.0 * p.epsilon(), e.lambda[0].imag() / (std::sqrt(p.c0()) * xi),
                    e.lambda[2].real() / (-p.b() - xi * xi), e.complex_pair});
  }
  return rows;
}

struct StabilityScan {
  double max_real = -std::numeric_limits<double>::infinity();
  double argmax_xi = 0.0;
  double max_positive_real_root = -std::numeric_limits<double>::infinity();
  std::vector<double> xi;
  std::vector<EigenTriple> triples;
};

/// Uniform scan |xi| = xi_max * i / samples, i = 1..samples.
inline StabilityScan stability_scan(const ModelParams& p, double xi_max, int samples) {
  if (!(xi_max > 0.0)) throw std::invalid_argument("stability scan needs xi_max > 0");
  if (samples < 1) throw std::invalid_argument("stability scan needs at least one sample");
  StabilityScan s;
  for (int i = 1; i <= samples; ++i) {
    const double xi = xi_max * i / samples;
    const auto e = eigenvalues(xi, p);
    if (e.max_real() > s.max_real) {
      s.max_real = e.max_real();
      s.argmax_xi = xi;
    }
    for (const auto& l : e.lambda) {
      if (l.imag() == 0.0) s.max_positive_real_root = std::max(s.max_positive_real_root, l.real());
    }
    s.xi.push_back(xi);
    s.triples.push_back(e);
  }
  return s;
}

/// Unstable band [0, sqrt(c1 mu - b)) when the margin is negative, else empty.
inline double unstable_band_edge(const ModelParams& p) {
  const double d = p.c1() * p.mu() - p.b();
  return d > 0.0 ? std::sqrt(d) : 0.0;
}

}  // namespace hpclab::linear
