#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "hpclab/errors.hpp"
#include "hpclab/model/pressure.hpp"

namespace hpclab::model {

/// Physical parameters of the damped system around the equilibrium rho_bar.
class ModelParams {
 public:
  ModelParams(double epsilon, double mu, double a, double b, double rho_bar, PressureLaw pressure,
              int threshold_offset = -2)
      : epsilon_(epsilon), mu_(mu), a_(a), b_(b), rho_bar_(rho_bar), pressure_(pressure), k_(threshold_offset) {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive");
    };
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1]");
    positive(mu, "mu");
    positive(a, "a");
    positive(b, "b");
    positive(rho_bar, "rho_bar");
    c0_ = pressure_.derivative(rho_bar_);
    if (!(c0_ > 0.0)) throw std::invalid_argument("pressure must be increasing at rho_bar");
    c1_ = a_ * rho_bar_ / c0_;
    if (std::abs(c0_ * c1_ - a_ * rho_bar_) > 1e-14 * a_ * rho_bar_) {
      throw NumericalFailure("c0 c1 != a rho_bar");
    }
    const double margin = stability_margin();
    if (std::abs(margin) > 1e-12 * c0_ && ((c1_ * mu_ < b_) != (margin > 0.0))) {
      throw NumericalFailure("stability margin disagrees with c1 mu < b");
    }
  }

  double epsilon() const { return epsilon_; }
  double mu() const { return mu_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double rho_bar() const { return rho_bar_; }
  const PressureLaw& pressure() const { return pressure_; }
  int threshold_offset() const { return k_; }

  double c0() const { return c0_; }
  double c1() const { return c1_; }
  double phi_bar() const { return a_ * rho_bar_ / b_; }
  double stability_margin() const { return c0_ - a_ * mu_ * rho_bar_ / b_; }

  ModelParams with_epsilon(double eps) const {
    return ModelParams(eps, mu_, a_, b_, rho_bar_, pressure_, k_);
  }
  ModelParams with_threshold_offset(int k) const {
    return ModelParams(epsilon_, mu_, a_, b_, rho_bar_, pressure_, k);
  }

 private:
  double epsilon_, mu_, a_, b_, rho_bar_;
  PressureLaw pressure_;
  int k_;
  double c0_ = 0.0;
  double c1_ = 0.0;
};

struct StabilityVerdict {
  bool stable;
  double margin;
};

inline StabilityVerdict check_stability(const ModelParams& p) {
  const double margin = p.stability_margin();
  return {margin > 0.0, margin};
}

// Validity window [rho_bar/2, 2 rho_bar].
inline double window_low(const ModelParams& p) { return 0.5 * p.rho_bar(); }
inline double window_high(const ModelParams& p) { return 2.0 * p.rho_bar(); }

/// Enthalpy as a function of x = rho/rho_bar - 1, written so that small
/// deviations keep full relative precision.
inline double enthalpy_of_ratio(double x, const ModelParams& p) {
  const double g = p.pressure().gamma();
  if (p.pressure().is_isothermal()) return p.pressure().kappa() * std::log1p(x);
  return p.c0() / (g - 1.0) * std::expm1((g - 1.0) * std::log1p(x));
}

inline double enthalpy_n(double rho, const ModelParams& p) {
  if (!(rho >= window_low(p) && rho <= window_high(p))) {
    throw WindowViolation("density " + std::to_string(rho) + " outside [rho_bar/2, 2 rho_bar]");
  }
  return enthalpy_of_ratio((rho - p.rho_bar()) / p.rho_bar(), p);
}

inline double enthalpy_min(const ModelParams& p) { return enthalpy_of_ratio(-0.5, p); }
inline double enthalpy_max(const ModelParams& p) { return enthalpy_of_ratio(1.0, p); }

inline void check_enthalpy(double n, const ModelParams& p) {
  if (!(n >= enthalpy_min(p) && n <= enthalpy_max(p))) {
    throw WindowViolation("enthalpy " + std::to_string(n) + " outside the image of the density window");
  }
}

/// rho - rho_bar as a function of n, without cancellation for small n.
inline double density_deviation(double n, const ModelParams& p) {
  check_enthalpy(n, p);
  const double g = p.pressure().gamma();
  if (p.pressure().is_isothermal()) return p.rho_bar() * std::expm1(n / p.pressure().kappa());
  return p.rho_bar() * std::expm1(std::log1p(n * (g - 1.0) / p.c0()) / (g - 1.0));
}

inline double density_rho(double n, const ModelParams& p) { return p.rho_bar() + density_deviation(n, p); }

/// G(n) = P'(rho) - P'(rho_bar).
inline double coefficient_G(double n, const ModelParams& p) {
  check_enthalpy(n, p);
  // P'(rho) = c0 + (gamma - 1) n for every gamma-law.
  return (p.pressure().gamma() - 1.0) * n;
}

/// H(n) = a (rho - rho_bar - rho_bar n / c0).
inline double coefficient_H(double n, const ModelParams& p) {
  const double g = p.pressure().gamma();
  const double dev = density_deviation(n, p);
  // rho is affine in n when gamma = 2.
  if (g == 2.0) return 0.0;
  if (std::abs(n) < 1e-4 * p.c0()) {
    // Series in y = n / c0 of rho_bar ((1 + (g-1) y)^{1/(g-1)} - 1 - y):
    // rho_bar y^2 (2-g)/2 + rho_bar y^3 (2-g)(3-2g)/6.
    const double y = n / p.c0();
    const double q = p.pressure().is_isothermal() ? 1.0 : (2.0 - g);
    const double r = p.pressure().is_isothermal() ? 1.0 : (2.0 - g) * (3.0 - 2.0 * g);
    return p.a() * p.rho_bar() * y * y * (0.5 * q + r * y / 6.0);
  }
  return p.a() * (dev - p.rho_bar() * n / p.c0());
}

}  // namespace hpclab::model
