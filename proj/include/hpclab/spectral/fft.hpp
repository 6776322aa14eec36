#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "hpclab/spectral/grid.hpp"

namespace hpclab::spectral {

namespace detail {

/// Forward and backward c2c plans for one (d, N) shape. Plans are built once
/// under a global lock and executed with the new-array interface, so a plan
/// may be shared across threads.
class FftPlans {
 public:
  static const FftPlans& get(int dim, int points) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<FftPlans>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{dim, points}];
    if (!slot) slot.reset(new FftPlans(dim, points));
    return *slot;
  }

  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;
  ~FftPlans() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  void forward(std::complex<double>* in, std::complex<double>* out) const {
    fftw_execute_dft(forward_, reinterpret_cast<fftw_complex*>(in), reinterpret_cast<fftw_complex*>(out));
  }
  void backward(std::complex<double>* in, std::complex<double>* out) const {
    fftw_execute_dft(backward_, reinterpret_cast<fftw_complex*>(in), reinterpret_cast<fftw_complex*>(out));
  }

 private:
  FftPlans(int dim, int points) {
    int n[3] = {points, points, points};
    std::size_t size = 1;
    for (int a = 0; a < dim; ++a) size *= points;
    fftw_complex* a = fftw_alloc_complex(size);
    fftw_complex* b = fftw_alloc_complex(size);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft(dim, n, a, b, FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft(dim, n, a, b, FFTW_BACKWARD, flags);
    fftw_free(a);
    fftw_free(b);
  }

  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace detail

/// Physical samples -> normalised Fourier-series coefficients, so that
/// f(x) = sum_m c_m exp(i xi_m . x).
inline void forward_transform(const Grid& grid, std::span<const std::complex<double>> in,
                              std::span<std::complex<double>> out) {
  std::vector<std::complex<double>> scratch(in.begin(), in.end());
  detail::FftPlans::get(grid.dim(), grid.points()).forward(scratch.data(), out.data());
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (auto& c : out) c *= scale;
}

/// Fourier-series coefficients -> physical samples.
inline void inverse_transform(const Grid& grid, std::span<const std::complex<double>> in,
                              std::span<std::complex<double>> out) {
  std::vector<std::complex<double>> scratch(in.begin(), in.end());
  detail::FftPlans::get(grid.dim(), grid.points()).backward(scratch.data(), out.data());
}

}  // namespace hpclab::spectral
