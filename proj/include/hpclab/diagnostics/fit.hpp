#pragma once

#include <stdexcept>
#include <vector>

#include "hpclab/numerics/least_squares.hpp"

namespace hpclab::diagnostics {

struct DecayFit {
  double slope = 0.0;
  double rms_residual = 0.0;
  std::size_t samples = 0;
};

/// Least-squares slope of log(value) against log(1 + eps t) for samples with
/// eps t in [window_lo, window_hi].
inline DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& value, double eps,
                          double window_lo, double window_hi) {
  if (t.size() != value.size()) throw std::invalid_argument("decay_fit: size mismatch");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double et = eps * t[i];
    if (et < window_lo || et > window_hi) continue;
    if (!(value[i] > 0.0)) throw std::domain_error("decay_fit: nonpositive value inside the window");
    x.push_back(1.0 + et);
    y.push_back(value[i]);
  }
  if (x.size() < 8) throw std::invalid_argument("decay_fit: fewer than 8 samples in the window");
  const auto f = numerics::fit_loglog(x, y);
  return {f.slope, f.rms_residual, f.samples};
}

}  // namespace hpclab::diagnostics
