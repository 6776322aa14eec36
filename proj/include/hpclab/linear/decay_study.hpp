#pragma once

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "hpclab/linear/propagator.hpp"
#include "hpclab/numerics/least_squares.hpp"
#include "hpclab/spectral/littlewood_paley.hpp"

namespace hpclab::linear {

/// Radial Fourier amplitudes of compressible initial data on R^d.
struct RadialProfile {
  std::function<double(double)> n;
  std::function<double(double)> m;
  std::function<double(double)> psi;
};

/// Gaussian density bump exp(-|x|^2 / (2 w^2)) with zero velocity; psi is
/// either zero or the linear well-prepared c1 (b - Delta)^{-1} n.
inline RadialProfile gaussian_profile(double width, const ModelParams& p, bool well_prepared = true) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian width must be positive");
  RadialProfile r;
  r.n = [width](double k) { return std::exp(-0.5 * k * k * width * width); };
  r.m = [](double) { return 0.0; };
  const double c1 = p.c1(), b = p.b();
  if (well_prepared) {
    r.psi = [width, c1, b](double k) { return c1 / (b + k * k) * std::exp(-0.5 * k * k * width * width); };
  } else {
    r.psi = [](double) { return 0.0; };
  }
  return r;
}

enum class DecayQuantity {
  full,    // the triple (n, u, psi)
  damped,  // b psi - c1 n
};

struct DecayStudyConfig {
  int dim = 1;
  double sigma0 = -0.5;
  double sigma = 0.5;
  spectral::Summability summability = spectral::Summability::one;
  DecayQuantity quantity = DecayQuantity::full;
  double window_lo = 5.0;   // in eps t
  double window_hi = 50.0;
  double horizon = 100.0;   // last sample in eps t
  int samples = 61;
  int j_lo = -40;
  int j_hi = 8;
  int panels = 2;           // Gauss panels between consecutive ring breakpoints
};

struct DecayStudyResult {
  std::vector<double> eps_t;
  std::vector<double> t;
  std::vector<double> norm;
  std::vector<bool> in_window;
  double slope = 0.0;
  double fit_residual = 0.0;
  double predicted_slope = 0.0;
  double quadrature_error = 0.0;
  std::size_t shells = 0;
};

/// Decay exponent claimed for the requested quantity.
inline double predicted_decay_slope(const DecayStudyConfig& c) {
  const double base = -(c.sigma - c.sigma0) / 2.0;
  return c.quantity == DecayQuantity::damped ? base - 0.5 : base;
}

inline void validate(const DecayStudyConfig& c) {
  const double half = c.dim / 2.0;
  if (c.dim < 1 || c.dim > 3) throw std::invalid_argument("decay study dimension must be 1, 2 or 3");
  if (!(c.sigma0 >= -half && c.sigma0 < half)) {
    throw std::invalid_argument("sigma0 must lie in [-d/2, d/2)");
  }
  const bool damped = c.quantity == DecayQuantity::damped;
  // sigma = sigma0 is meaningful only in the sup-over-rings norm.
  const bool endpoint_ok = c.summability == spectral::Summability::infinity;
  if (!damped && !((c.sigma > c.sigma0 || (endpoint_ok && c.sigma == c.sigma0)) && c.sigma <= half)) {
    throw std::invalid_argument("sigma must lie in (sigma0, d/2], or equal sigma0 with summability inf");
  }
  if (damped && !(c.sigma >= c.sigma0 && c.sigma <= half)) {
    throw std::invalid_argument("sigma must lie in [sigma0, d/2] for the damped combination");
  }
  if (!(c.window_lo > 0.0 && c.window_hi > c.window_lo && c.horizon >= c.window_hi)) {
    throw std::invalid_argument("decay window must satisfy 0 < lo < hi <= horizon");
  }
  if (c.samples < 16) throw std::invalid_argument("decay study needs at least 16 time samples");
  if (c.j_hi <= c.j_lo) throw std::invalid_argument("decay study ring range is empty");
  if (c.panels < 1) throw std::invalid_argument("decay study needs at least one panel");
}

namespace detail {

struct Shell {
  double r;
  double weight;  // includes the r^d Jacobian of the log-variable and the sphere area
};

inline double sphere_area(int d) {
  return d == 1 ? 2.0 : (d == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi);
}

inline std::vector<Shell> radial_shells(int d, int j_lo, int j_hi, int panels) {
  std::set<double> breaks;
  for (int j = j_lo; j <= j_hi; ++j) {
    for (double f : {0.75, 4.0 / 3.0, 1.5, 8.0 / 3.0}) breaks.insert(std::log(std::ldexp(f, j)));
  }
  using Rule = boost::math::quadrature::gauss<double, 16>;
  std::vector<double> nodes, weights;
  for (std::size_t i = 0; i < Rule::abscissa().size(); ++i) {
    const double x = Rule::abscissa()[i];
    const double w = Rule::weights()[i];
    nodes.push_back(x);
    weights.push_back(w);
    if (x != 0.0) {
      nodes.push_back(-x);
      weights.push_back(w);
    }
  }
  const double prefactor = sphere_area(d) / std::pow(2.0 * std::numbers::pi, d);
  std::vector<Shell> shells;
  const std::vector<double> b(breaks.begin(), breaks.end());
  for (std::size_t k = 0; k + 1 < b.size(); ++k) {
    const double h = (b[k + 1] - b[k]) / panels;
    for (int p = 0; p < panels; ++p) {
      const double lo = b[k] + p * h;
      for (std::size_t q = 0; q < nodes.size(); ++q) {
        const double s = lo + 0.5 * h * (nodes[q] + 1.0);
        const double r = std::exp(s);
        shells.push_back({r, prefactor * 0.5 * h * weights[q] * std::pow(r, d)});
      }
    }
  }
  std::sort(shells.begin(), shells.end(), [](const Shell& a, const Shell& c) { return a.r < c.r; });
  return shells;
}

/// Ring masses sum_shell phi(2^{-j} r)^2 |f(r)|^2 w for j in [j_lo, j_hi].
inline std::vector<double> ring_masses(const std::vector<Shell>& shells, const std::vector<double>& mass, int j_lo,
                                       int j_hi) {
  std::vector<double> out(j_hi - j_lo + 1, 0.0);
  for (std::size_t s = 0; s < shells.size(); ++s) {
    if (mass[s] == 0.0) continue;
    const int top = static_cast<int>(std::floor(std::log2(shells[s].r / spectral::kChiInner)));
    for (int j = std::max(j_lo, top - 2); j <= std::min(j_hi, top + 1); ++j) {
      const double w = spectral::ring_weight(j, shells[s].r);
      out[j - j_lo] += w * w * mass[s] * shells[s].weight;
    }
  }
  return out;
}

inline double besov_from_rings(const std::vector<double>& rings, int j_lo, double s, spectral::Summability r) {
  double acc = 0.0;
  for (std::size_t k = 0; k < rings.size(); ++k) {
    const double v = std::exp2((j_lo + static_cast<int>(k)) * s) * std::sqrt(rings[k]);
    acc = r == spectral::Summability::one ? acc + v : std::max(acc, v);
  }
  return acc;
}

inline double quantity_mass(const Eigen::Vector3d& x, DecayQuantity q, const ModelParams& p) {
  if (q == DecayQuantity::full) return x.squaredNorm();
  const double d = p.b() * x(2) - p.c1() * x(0);
  return d * d;
}

}  // namespace detail

/// Continuum Besov norm of a radial profile, by the same ring quadrature.
inline double continuum_besov_norm(const std::function<double(double)>& amplitude, int dim, double s,
                                   spectral::Summability r, int j_lo, int j_hi, int panels = 2) {
  const auto shells = detail::radial_shells(dim, j_lo, j_hi, panels);
  std::vector<double> mass(shells.size());
  for (std::size_t k = 0; k < shells.size(); ++k) {
    const double a = amplitude(shells[k].r);
    mass[k] = a * a;
  }
  return detail::besov_from_rings(detail::ring_masses(shells, mass, j_lo, j_hi), j_lo, s, r);
}

/// Evolve every radial shell by exp(tA(|xi|)) and fit the decay of the chosen
/// Besov norm against log(1 + eps t) on the window.
inline DecayStudyResult semigroup_decay_study(const ModelParams& p, const DecayStudyConfig& c,
                                              const RadialProfile& profile) {
  validate(c);
  DecayStudyResult res;
  res.predicted_slope = predicted_decay_slope(c);

  // Quadrature resolution check on the initial ring masses.
  {
    auto initial = [&](int panels) {
      const auto shells = detail::radial_shells(c.dim, c.j_lo, c.j_hi, panels);
      std::vector<double> mass(shells.size());
      for (std::size_t k = 0; k < shells.size(); ++k) {
        const double r = shells[k].r;
        mass[k] = detail::quantity_mass(Eigen::Vector3d(profile.n(r), profile.m(r), profile.psi(r)), c.quantity, p);
      }
      return detail::ring_masses(shells, mass, c.j_lo, c.j_hi);
    };
    const auto coarse = initial(c.panels);
    const auto fine = initial(2 * c.panels);
    const double peak = *std::max_element(fine.begin(), fine.end());
    for (std::size_t k = 0; k < fine.size(); ++k) {
      if (fine[k] <= 1e-12 * peak) continue;
      res.quadrature_error = std::max(res.quadrature_error, std::abs(coarse[k] - fine[k]) / fine[k]);
    }
    if (res.quadrature_error > 1e-6) {
      throw std::runtime_error("radial quadrature unresolved: ring mass error " +
                               std::to_string(res.quadrature_error));
    }
  }

  const auto shells = detail::radial_shells(c.dim, c.j_lo, c.j_hi, c.panels);
  res.shells = shells.size();
  const double eps = p.epsilon();
  res.eps_t.push_back(0.0);
  const double lo = std::log(0.1), hi = std::log(c.horizon);
  for (int i = 0; i < c.samples; ++i) res.eps_t.push_back(std::exp(lo + (hi - lo) * i / (c.samples - 1)));
  for (double et : res.eps_t) res.t.push_back(et / eps);

  std::vector<std::vector<double>> mass(res.t.size(), std::vector<double>(shells.size(), 0.0));
  for (std::size_t s = 0; s < shells.size(); ++s) {
    const double r = shells[s].r;
    const Eigen::Vector3d x0(profile.n(r), profile.m(r), profile.psi(r));
    if (x0.squaredNorm() == 0.0) continue;
    const Eigen::Matrix3d A = symbol_matrix(r, p).compressible;
    Eigen::EigenSolver<Eigen::Matrix3d> es(A, true);
    bool direct = es.info() == Eigen::Success;
    Eigen::Matrix3cd V;
    Eigen::Vector3cd coeff;
    if (direct) {
      V = es.eigenvectors();
      const Eigen::JacobiSVD<Eigen::Matrix3cd> svd(V);
      direct = svd.singularValues()(0) <= kConditionLimit * svd.singularValues()(2);
      if (direct) coeff = V.partialPivLu().solve(x0.cast<cplx>());
    }
    for (std::size_t k = 0; k < res.t.size(); ++k) {
      Eigen::Vector3d x;
      if (direct) {
        Eigen::Vector3cd e;
        for (int i = 0; i < 3; ++i) e(i) = std::exp(res.t[k] * es.eigenvalues()(i)) * coeff(i);
        x = (V * e).real();
      } else {
        x = propagator_exp(r, res.t[k], p) * x0;
      }
      mass[k][s] = detail::quantity_mass(x, c.quantity, p);
    }
  }

  std::vector<double> fx, fy;
  for (std::size_t k = 0; k < res.t.size(); ++k) {
    const auto rings = detail::ring_masses(shells, mass[k], c.j_lo, c.j_hi);
    const double v = detail::besov_from_rings(rings, c.j_lo, c.sigma, c.summability);
    res.norm.push_back(v);
    const bool in = res.eps_t[k] >= c.window_lo && res.eps_t[k] <= c.window_hi;
    res.in_window.push_back(in);
    if (in) {
      fx.push_back(1.0 + res.eps_t[k]);
      fy.push_back(v);
    }
  }
  if (fx.size() < 8) throw std::invalid_argument("decay window holds fewer than 8 samples");
  const auto fit = numerics::fit_loglog(fx, fy);
  res.slope = fit.slope;
  res.fit_residual = fit.rms_residual;
  return res;
}

}  // namespace hpclab::linear
