#include <gtest/gtest.h>

#include <cmath>

#include "hpclab/errors.hpp"
#include "hpclab/model/params.hpp"

using namespace hpclab;
using namespace hpclab::model;

namespace {

ModelParams gamma_params(double gamma, double kappa = 1.0, double a = 1.0, double mu = 1.0, double b = 1.0,
                         double rho_bar = 1.0) {
  return ModelParams(0.1, mu, a, b, rho_bar, PressureLaw::gamma_law(kappa, gamma));
}

}  // namespace

TEST(Pressure, Derivatives) {
  const auto P = PressureLaw::gamma_law(2.0, 3.0);
  EXPECT_DOUBLE_EQ(P.pressure(1.5), 2.0 * 3.375);
  EXPECT_DOUBLE_EQ(P.derivative(1.5), 2.0 * 3.0 * 2.25);
  EXPECT_DOUBLE_EQ(P.second_derivative(1.5), 2.0 * 6.0 * 1.5);
  EXPECT_DOUBLE_EQ(P.third_derivative(1.5), 12.0);
  EXPECT_TRUE(PressureLaw::isothermal(1.0).is_isothermal());
  EXPECT_THROW(PressureLaw::gamma_law(1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(PressureLaw::gamma_law(0.0, 2.0), std::invalid_argument);
}

TEST(Params, DerivedConstants) {
  const ModelParams p(0.1, 0.5, 2.0, 3.0, 1.5, PressureLaw::gamma_law(1.0, 2.0));
  EXPECT_DOUBLE_EQ(p.c0(), 3.0);
  EXPECT_DOUBLE_EQ(p.c1(), 1.0);
  EXPECT_DOUBLE_EQ(p.phi_bar(), 1.0);
  EXPECT_DOUBLE_EQ(p.stability_margin(), 3.0 - 0.5);
  EXPECT_NEAR(p.c0() * p.c1(), p.a() * p.rho_bar(), 1e-15);
}

TEST(Params, RejectsInvalidValues) {
  const auto P = PressureLaw::gamma_law(1.0, 2.0);
  EXPECT_THROW(ModelParams(0.0, 1, 1, 1, 1, P), std::invalid_argument);
  EXPECT_THROW(ModelParams(1.01, 1, 1, 1, 1, P), std::invalid_argument);
  EXPECT_NO_THROW(ModelParams(1.0, 1, 1, 1, 1, P));
  EXPECT_THROW(ModelParams(0.1, -1, 1, 1, 1, P), std::invalid_argument);
  EXPECT_THROW(ModelParams(0.1, 1, 0, 1, 1, P), std::invalid_argument);
  EXPECT_THROW(ModelParams(0.1, 1, 1, 0, 1, P), std::invalid_argument);
  EXPECT_THROW(ModelParams(0.1, 1, 1, 1, 0, P), std::invalid_argument);
}

TEST(Enthalpy, ClosedFormExamples) {
  EXPECT_NEAR(enthalpy_n(1.2, gamma_params(2.0)), 0.4, 1e-15);
  EXPECT_EQ(enthalpy_n(1.0, ModelParams(0.1, 1, 1, 2, 1, PressureLaw::isothermal(1.0))), 0.0);
  EXPECT_NEAR(enthalpy_n(1.1, gamma_params(3.0)), 0.315, 1e-15);
  EXPECT_NEAR(enthalpy_n(1.3, ModelParams(0.1, 1, 1, 2, 1, PressureLaw::isothermal(1.0))), std::log(1.3), 1e-15);
}

TEST(Enthalpy, InverseExamples) {
  EXPECT_NEAR(density_rho(0.4, gamma_params(2.0)), 1.2, 1e-15);
  EXPECT_EQ(density_rho(0.0, gamma_params(2.0)), 1.0);
  EXPECT_NEAR(density_rho(0.315, gamma_params(3.0)), 1.1, 1e-15);
}

TEST(Enthalpy, RoundTripAndMonotone) {
  for (double gamma : {1.0, 1.4, 2.0, 3.0}) {
    const auto p = gamma_params(gamma, 1.3, 1.0, 0.2, 1.0, 0.8);
    double prev = -1e300;
    for (int i = 0; i <= 200; ++i) {
      const double rho = 0.4 + 1.2 * i / 200.0;
      const double n = enthalpy_n(rho, p);
      EXPECT_GT(n, prev);
      prev = n;
      EXPECT_NEAR(density_rho(n, p) / rho, 1.0, 1e-13) << "gamma " << gamma << " rho " << rho;
    }
  }
}

TEST(Enthalpy, WindowViolations) {
  const auto p = gamma_params(2.0);
  EXPECT_THROW(enthalpy_n(0.49, p), WindowViolation);
  EXPECT_THROW(enthalpy_n(2.01, p), WindowViolation);
  EXPECT_THROW(density_rho(enthalpy_max(p) + 1e-3, p), WindowViolation);
  EXPECT_THROW(density_rho(enthalpy_min(p) - 1e-3, p), WindowViolation);
}

TEST(CoefficientG, Examples) {
  EXPECT_EQ(coefficient_G(0.0, gamma_params(3.0)), 0.0);
  EXPECT_NEAR(coefficient_G(0.4, gamma_params(2.0)), 0.4, 1e-15);
  const ModelParams iso(0.1, 1, 1, 2, 1, PressureLaw::isothermal(1.0));
  for (double n : {-0.5, -0.1, 0.0, 0.2, 0.6}) EXPECT_EQ(coefficient_G(n, iso), 0.0);
}

TEST(CoefficientH, VanishesForQuadraticPressure) {
  const auto p = gamma_params(2.0);
  for (double n = enthalpy_min(p); n <= enthalpy_max(p); n += 0.01) {
    EXPECT_EQ(coefficient_H(n, p), 0.0);
    EXPECT_NEAR(density_rho(n, p), 1.0 + n / 2.0, 1e-15);
  }
}

TEST(CoefficientH, CubicPressureTaylorCoefficient) {
  const auto p = gamma_params(3.0);
  // rho = sqrt(1 + 2n/3); H = rho - 1 - n/3 evaluated in long double.
  const long double n = 0.01L;
  const long double ref = std::sqrt(1.0L + 2.0L * n / 3.0L) - 1.0L - n / 3.0L;
  EXPECT_NEAR(coefficient_H(0.01, p), static_cast<double>(ref), 1e-16);
  EXPECT_LE(std::abs(coefficient_H(0.01, p) / 1e-4 + 1.0 / 18.0), 1e-3);
  EXPECT_EQ(coefficient_H(0.0, p), 0.0);
}

TEST(CoefficientH, QuadraticAtOrigin) {
  for (double gamma : {1.0, 1.5, 3.0}) {
    const auto p = gamma_params(gamma, 1.0, 0.7);
    // |H(n)| <= a sup|rho''(n)| n^2 / 2 with rho'' = rho (1 - rho^{1-gamma}... ) bounded below by the window.
    double cmax = 0.0;
    for (double n = -0.1; n <= 0.1; n += 1e-4) {
      const double h = coefficient_H(n, p);
      if (n != 0.0) cmax = std::max(cmax, std::abs(h) / (n * n));
    }
    EXPECT_LT(cmax, 1.0) << "gamma " << gamma;
    EXPECT_LT(std::abs(coefficient_H(1e-8, p)), 1e-15);
  }
}

TEST(Stability, Examples) {
  const auto s1 = check_stability(gamma_params(2.0));
  EXPECT_TRUE(s1.stable);
  EXPECT_DOUBLE_EQ(s1.margin, 1.0);
  const auto s2 = check_stability(gamma_params(2.0, 0.5));
  EXPECT_FALSE(s2.stable);
  EXPECT_DOUBLE_EQ(s2.margin, 0.0);
  const auto s3 = check_stability(gamma_params(2.0, 0.25));
  EXPECT_FALSE(s3.stable);
  EXPECT_DOUBLE_EQ(s3.margin, -0.5);
}

TEST(Stability, MarginSignMatchesC1MuBelowB) {
  for (double mu : {0.1, 0.5, 0.9, 1.1, 2.0}) {
    for (double gamma : {1.0, 2.0, 3.0}) {
      const auto p = gamma_params(gamma, 1.0, 1.0, mu, 1.5);
      EXPECT_EQ(p.stability_margin() > 0.0, p.c1() * p.mu() < p.b());
    }
  }
}
