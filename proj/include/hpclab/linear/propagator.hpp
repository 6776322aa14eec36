#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "hpclab/linear/symbol.hpp"

namespace hpclab::linear {

/// phi_1(z) = (e^z - 1)/z.
inline cplx phi1(cplx z) {
  if (std::abs(z) < 1.0) {
    cplx term = 1.0;
    cplx sum = 1.0;
    for (int k = 2; k < 22; ++k) {
      term *= z / static_cast<double>(k);
      sum += term;
    }
    return sum;
  }
  return (std::exp(z) - 1.0) / z;
}

/// phi_2(z) = (e^z - 1 - z)/z^2.
inline cplx phi2(cplx z) {
  if (std::abs(z) < 1.0) {
    cplx term = 0.5;
    cplx sum = 0.5;
    for (int k = 3; k < 23; ++k) {
      term *= z / static_cast<double>(k);
      sum += term;
    }
    return sum;
  }
  return (std::exp(z) - 1.0 - z) / (z * z);
}

/// Exact linear step of length h for one radial mode:
/// E = exp(hA), F1 = h phi_1(hA), F2 = h phi_2(hA) on the compressible block,
/// and the matching scalars for the incompressible block.
struct ModePropagator {
  Eigen::Matrix3d exp = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d phi1 = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d phi2 = Eigen::Matrix3d::Zero();
  double inc_exp = 1.0;
  double inc_phi1 = 0.0;
  double inc_phi2 = 0.0;
  bool used_fallback = false;
};

inline constexpr double kConditionLimit = 1e8;

namespace detail {

inline double scaled_phi1(double h, double lambda) { return h * phi1(cplx(h * lambda)).real(); }
inline double scaled_phi2(double h, double lambda) { return h * phi2(cplx(h * lambda)).real(); }

inline ModePropagator zero_mode(double h, const ModelParams& p) {
  ModePropagator m;
  const double b = p.b();
  const double ue = std::exp(-h / p.epsilon());
  const double pe = std::exp(-b * h);
  m.exp << 1.0, 0.0, 0.0, 0.0, ue, 0.0, p.c1() * (-std::expm1(-b * h)) / b, 0.0, pe;
  const double u1 = scaled_phi1(h, -1.0 / p.epsilon());
  const double u2 = scaled_phi2(h, -1.0 / p.epsilon());
  const double b1 = scaled_phi1(h, -b);
  const double b2 = scaled_phi2(h, -b);
  m.phi1 << h, 0.0, 0.0, 0.0, u1, 0.0, p.c1() / b * (h - b1), 0.0, b1;
  m.phi2 << 0.5 * h, 0.0, 0.0, 0.0, u2, 0.0, p.c1() / b * (0.5 * h - b2), 0.0, b2;
  return m;
}

inline void pade_route(const Eigen::Matrix3d& A, double h, ModePropagator& m) {
  Eigen::Matrix<double, 9, 9> aug = Eigen::Matrix<double, 9, 9>::Zero();
  aug.block<3, 3>(0, 0) = h * A;
  aug.block<3, 3>(0, 3) = Eigen::Matrix3d::Identity();
  aug.block<3, 3>(3, 6) = Eigen::Matrix3d::Identity();
  const Eigen::Matrix<double, 9, 9> e = aug.exp();
  m.exp = e.block<3, 3>(0, 0);
  m.phi1 = h * e.block<3, 3>(0, 3);
  m.phi2 = h * e.block<3, 3>(0, 6);
  m.used_fallback = true;
}

}  // namespace detail

inline ModePropagator mode_propagator(double xi, double h, const ModelParams& p) {
  if (!(h >= 0.0)) throw std::invalid_argument("propagator needs h >= 0");
  ModePropagator m;
  m.inc_exp = std::exp(-h / p.epsilon());
  m.inc_phi1 = detail::scaled_phi1(h, -1.0 / p.epsilon());
  m.inc_phi2 = detail::scaled_phi2(h, -1.0 / p.epsilon());
  if (h == 0.0) return m;
  if (xi == 0.0) {
    auto z = detail::zero_mode(h, p);
    z.inc_exp = m.inc_exp;
    z.inc_phi1 = m.inc_phi1;
    z.inc_phi2 = m.inc_phi2;
    return z;
  }
  const Eigen::Matrix3d A = symbol_matrix(xi, p).compressible;
  Eigen::EigenSolver<Eigen::Matrix3d> es(A, true);
  bool ok = es.info() == Eigen::Success;
  if (ok) {
    const Eigen::Matrix3cd V = es.eigenvectors();
    const Eigen::JacobiSVD<Eigen::Matrix3cd> svd(V);
    const auto& sv = svd.singularValues();
    const double cond = sv(2) > 0.0 ? sv(0) / sv(2) : std::numeric_limits<double>::infinity();
    ok = cond <= kConditionLimit;
    if (ok) {
      const Eigen::Matrix3cd Vinv = V.inverse();
      Eigen::Vector3cd de, d1, d2;
      for (int i = 0; i < 3; ++i) {
        const cplx z = h * es.eigenvalues()(i);
        de(i) = std::exp(z);
        d1(i) = h * phi1(z);
        d2(i) = h * phi2(z);
      }
      m.exp = (V * de.asDiagonal() * Vinv).real();
      m.phi1 = (V * d1.asDiagonal() * Vinv).real();
      m.phi2 = (V * d2.asDiagonal() * Vinv).real();
    }
  }
  if (!ok) detail::pade_route(A, h, m);
  return m;
}

/// exp(tA(xi)) alone.
inline Eigen::Matrix3d propagator_exp(double xi, double t, const ModelParams& p) {
  return mode_propagator(xi, t, p).exp;
}

}  // namespace hpclab::linear
