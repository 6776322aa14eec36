#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hpclab/spectral/fft.hpp"
#include "hpclab/spectral/grid.hpp"

namespace hpclab::spectral {

using cplx = std::complex<double>;

/// Fourier coefficients of a real scalar or vector field on a periodic grid.
///
/// Storage is the full complex FFT layout, one block of grid.size()
/// coefficients per component. Coefficients are normalised so that
/// ||f||_{L^2}^2 = L^d * sum |c_m|^2.
class SpectralField {
 public:
  explicit SpectralField(Grid grid, int components = 1)
      : grid_(std::move(grid)), components_(components), data_(grid_.size() * components) {
    if (components < 1) throw std::invalid_argument("field needs at least one component");
  }

  /// values holds components * grid.size() physical samples, component-major.
  static SpectralField from_physical(const Grid& grid, std::span<const double> values, int components = 1) {
    if (values.size() != grid.size() * static_cast<std::size_t>(components)) {
      throw std::invalid_argument("physical sample count " + std::to_string(values.size()) +
                                  " does not match grid");
    }
    SpectralField f(grid, components);
    std::vector<cplx> buf(grid.size());
    for (int c = 0; c < components; ++c) {
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = values[c * grid.size() + i];
        if (!std::isfinite(v)) throw std::domain_error("non-finite physical sample");
        buf[i] = v;
      }
      forward_transform(grid, buf, f.component(c));
    }
    return f;
  }

  template <class Fn>
  static SpectralField from_function(const Grid& grid, Fn&& fn) {
    std::vector<double> values(grid.size());
    std::vector<double> x(grid.dim());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (int a = 0; a < grid.dim(); ++a) x[a] = grid.coordinate(i, a);
      values[i] = fn(std::span<const double>(x));
    }
    return from_physical(grid, values, 1);
  }

  /// Real parts of the physical samples, component-major.
  std::vector<double> to_physical() const {
    std::vector<double> out(data_.size());
    std::vector<cplx> buf(grid_.size());
    for (int c = 0; c < components_; ++c) {
      inverse_transform(grid_, component(c), buf);
      for (std::size_t i = 0; i < grid_.size(); ++i) out[c * grid_.size() + i] = buf[i].real();
    }
    return out;
  }

  std::vector<cplx> to_physical_complex(int c) const {
    std::vector<cplx> buf(grid_.size());
    inverse_transform(grid_, component(c), buf);
    return buf;
  }

  const Grid& grid() const { return grid_; }
  int components() const { return components_; }
  std::size_t size() const { return grid_.size(); }

  std::span<cplx> component(int c) { return {data_.data() + c * grid_.size(), grid_.size()}; }
  std::span<const cplx> component(int c) const { return {data_.data() + c * grid_.size(), grid_.size()}; }
  cplx& operator()(int c, std::size_t idx) { return data_[c * grid_.size() + idx]; }
  const cplx& operator()(int c, std::size_t idx) const { return data_[c * grid_.size() + idx]; }
  std::span<cplx> data() { return data_; }
  std::span<const cplx> data() const { return data_; }

  /// Extract one component as a scalar field.
  SpectralField slice(int c) const {
    SpectralField out(grid_, 1);
    std::copy_n(component(c).begin(), grid_.size(), out.data_.begin());
    return out;
  }
  void assign_component(int c, const SpectralField& scalar) {
    check_grid(scalar);
    std::copy_n(scalar.component(0).begin(), grid_.size(), component(c).begin());
  }

  SpectralField& operator+=(const SpectralField& o) {
    check_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    check_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  SpectralField& operator*=(double s) {
    for (auto& v : data_) v *= s;
    return *this;
  }
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }

  /// L^2 norm over the torus by Parseval, summed over components.
  double l2_norm() const { return std::sqrt(grid_.volume() * squared_sum()); }
  double squared_sum() const {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return s;
  }
  cplx mean(int c = 0) const { return component(c)[0]; }
  double max_abs_coefficient() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  /// Largest |c_m - conj(c_{-m})|; zero for the transform of a real field.
  double conjugate_asymmetry() const {
    double worst = 0.0;
    for (int c = 0; c < components_; ++c) {
      auto comp = component(c);
      for (std::size_t i = 0; i < grid_.size(); ++i) {
        worst = std::max(worst, std::abs(comp[i] - std::conj(comp[grid_.mirror(i)])));
      }
    }
    return worst;
  }

  /// Project onto the Hermitian-symmetric subspace (real physical field).
  void enforce_real() {
    for (int c = 0; c < components_; ++c) {
      auto comp = component(c);
      for (std::size_t i = 0; i < grid_.size(); ++i) {
        const std::size_t j = grid_.mirror(i);
        if (j < i) continue;
        const cplx avg = 0.5 * (comp[i] + std::conj(comp[j]));
        comp[i] = avg;
        comp[j] = std::conj(avg);
      }
    }
  }

  /// Zero every mode flagged as Nyquist.
  void zero_nyquist() {
    for (int c = 0; c < components_; ++c) {
      auto comp = component(c);
      for (std::size_t i = 0; i < grid_.size(); ++i) {
        if (grid_.is_nyquist(i)) comp[i] = 0.0;
      }
    }
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
  }

  void check_grid(const SpectralField& o) const {
    if (!(o.grid_ == grid_)) throw std::invalid_argument("fields live on different grids");
  }
  void check_shape(const SpectralField& o) const {
    check_grid(o);
    if (o.components_ != components_) throw std::invalid_argument("component count mismatch");
  }

 private:
  Grid grid_;
  int components_;
  std::vector<cplx> data_;
};

/// Direct quadrature of ||f||_{L^2} from physical samples.
inline double physical_l2_norm(const Grid& grid, std::span<const double> values) {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s * grid.cell_volume());
}

/// Build a vector field from d scalar fields.
inline SpectralField stack(const std::vector<SpectralField>& parts) {
  if (parts.empty()) throw std::invalid_argument("stack needs at least one part");
  int total = 0;
  for (const auto& p : parts) total += p.components();
  SpectralField out(parts.front().grid(), total);
  int c = 0;
  for (const auto& p : parts) {
    out.check_grid(p);
    for (int k = 0; k < p.components(); ++k, ++c) {
      std::copy_n(p.component(k).begin(), p.size(), out.component(c).begin());
    }
  }
  return out;
}

}  // namespace hpclab::spectral
