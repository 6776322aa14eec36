#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace hpclab::model {

/// P(rho) = kappa rho^gamma with gamma >= 1; gamma = 1 is the isothermal law.
class PressureLaw {
 public:
  static PressureLaw gamma_law(double kappa, double gamma) {
    if (!(kappa > 0.0)) throw std::invalid_argument("pressure kappa must be positive");
    if (!(gamma >= 1.0) || !std::isfinite(gamma)) throw std::invalid_argument("pressure gamma must be >= 1");
    return PressureLaw(kappa, gamma);
  }
  static PressureLaw isothermal(double kappa) { return gamma_law(kappa, 1.0); }

  double kappa() const { return kappa_; }
  double gamma() const { return gamma_; }
  bool is_isothermal() const { return gamma_ == 1.0; }

  double pressure(double rho) const { return kappa_ * std::pow(rho, gamma_); }
  double derivative(double rho) const { return kappa_ * gamma_ * std::pow(rho, gamma_ - 1.0); }
  double second_derivative(double rho) const {
    return kappa_ * gamma_ * (gamma_ - 1.0) * std::pow(rho, gamma_ - 2.0);
  }
  double third_derivative(double rho) const {
    return kappa_ * gamma_ * (gamma_ - 1.0) * (gamma_ - 2.0) * std::pow(rho, gamma_ - 3.0);
  }

  std::string describe() const {
    if (is_isothermal()) return "isothermal(kappa=" + std::to_string(kappa_) + ")";
    return "gamma-law(kappa=" + std::to_string(kappa_) + ", gamma=" + std::to_string(gamma_) + ")";
  }

 private:
  PressureLaw(double kappa, double gamma) : kappa_(kappa), gamma_(gamma) {}
  double kappa_;
  double gamma_;
};

}  // namespace hpclab::model
