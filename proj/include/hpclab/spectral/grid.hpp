#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hpclab::spectral {

/// Uniform periodic grid on the torus [0, L)^d with N points per axis.
///
/// Flat indices are row-major over the multi-index (i_0, ..., i_{d-1}); the
/// first axis varies slowest, matching FFTW's layout. Mode numbers follow the
/// usual FFT ordering: index i maps to m = i for i < N/2 and m = i - N
/// otherwise, so the Nyquist mode carries m = -N/2.
class Grid {
 public:
  Grid(int dim, int points, double length) : dim_(dim), points_(points), length_(length) {
    if (dim < 1 || dim > 3) {
      throw std::invalid_argument("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
    }
    if (points < 8 || (points & (points - 1)) != 0) {
      throw std::invalid_argument("points per axis must be a power of two >= 8, got " +
                                  std::to_string(points));
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
      throw std::invalid_argument("period length must be positive");
    }
    build_tables();
  }

  int dim() const { return dim_; }
  int points() const { return points_; }
  double length() const { return length_; }
  double spacing() const { return length_ / points_; }
  double cell_volume() const { return std::pow(spacing(), dim_); }
  double volume() const { return std::pow(length_, dim_); }
  std::size_t size() const { return tables_->size; }

  /// Fundamental wavenumber 2 pi / L.
  double base_wavenumber() const { return 2.0 * std::numbers::pi / length_; }
  double min_wavenumber() const { return base_wavenumber(); }
  /// |xi| at the corner Nyquist mode, pi N sqrt(d) / L.
  double max_wavenumber() const {
    return std::numbers::pi * points_ * std::sqrt(static_cast<double>(dim_)) / length_;
  }

  std::span<const double> wavevector(std::size_t idx) const {
    return {tables_->wavevectors.data() + idx * dim_, static_cast<std::size_t>(dim_)};
  }
  double wavenumber(std::size_t idx) const { return tables_->norms[idx]; }
  /// Integer |m|^2; |xi|^2 = base_wavenumber()^2 * mode_norm2.
  long mode_norm2(std::size_t idx) const { return tables_->mode_norm2[idx]; }
  std::span<const int> mode(std::size_t idx) const {
    return {tables_->modes.data() + idx * dim_, static_cast<std::size_t>(dim_)};
  }
  /// Flat index of the mode -m.
  std::size_t mirror(std::size_t idx) const { return tables_->mirror[idx]; }
  /// True when any component sits on the Nyquist mode -N/2.
  bool is_nyquist(std::size_t idx) const { return tables_->nyquist[idx] != 0; }
  /// 2/3-rule mask: every |m_i| <= N/3.
  bool is_resolved(std::size_t idx) const { return tables_->resolved[idx] != 0; }

  std::size_t index_of(std::span<const int> m) const {
    std::size_t idx = 0;
    for (int a = 0; a < dim_; ++a) {
      int i = m[a] % points_;
      if (i < 0) i += points_;
      idx = idx * points_ + static_cast<std::size_t>(i);
    }
    return idx;
  }

  /// Physical coordinate of grid point idx along axis.
  double coordinate(std::size_t idx, int axis) const {
    std::size_t stride = 1;
    for (int a = dim_ - 1; a > axis; --a) stride *= points_;
    return static_cast<double>((idx / stride) % points_) * spacing();
  }

  bool operator==(const Grid& other) const {
    return dim_ == other.dim_ && points_ == other.points_ && length_ == other.length_;
  }

 private:
  struct Tables {
    std::size_t size = 0;
    std::vector<double> wavevectors;
    std::vector<double> norms;
    std::vector<long> mode_norm2;
    std::vector<int> modes;
    std::vector<std::size_t> mirror;
    std::vector<unsigned char> nyquist;
    std::vector<unsigned char> resolved;
  };

  void build_tables() {
    auto t = std::make_shared<Tables>();
    std::size_t size = 1;
    for (int a = 0; a < dim_; ++a) size *= static_cast<std::size_t>(points_);
    t->size = size;
    t->wavevectors.resize(size * dim_);
    t->norms.resize(size);
    t->mode_norm2.resize(size);
    t->modes.resize(size * dim_);
    t->mirror.resize(size);
    t->nyquist.resize(size);
    t->resolved.resize(size);
    const double k0 = base_wavenumber();
    for (std::size_t idx = 0; idx < size; ++idx) {
      std::size_t rem = idx;
      std::array<int, 3> m{};
      for (int a = dim_ - 1; a >= 0; --a) {
        const int i = static_cast<int>(rem % points_);
        rem /= points_;
        m[a] = i < points_ / 2 ? i : i - points_;
      }
      long n2 = 0;
      bool nyq = false;
      bool res = true;
      std::size_t mir = 0;
      for (int a = 0; a < dim_; ++a) {
        t->modes[idx * dim_ + a] = m[a];
        t->wavevectors[idx * dim_ + a] = k0 * m[a];
        n2 += static_cast<long>(m[a]) * m[a];
        nyq = nyq || (m[a] == -points_ / 2);
        res = res && (3 * std::abs(m[a]) <= points_);
        int mi = (-m[a]) % points_;
        if (mi < 0) mi += points_;
        mir = mir * points_ + static_cast<std::size_t>(mi);
      }
      t->mode_norm2[idx] = n2;
      t->norms[idx] = k0 * std::sqrt(static_cast<double>(n2));
      t->nyquist[idx] = nyq ? 1 : 0;
      t->resolved[idx] = res ? 1 : 0;
      t->mirror[idx] = mir;
    }
    tables_ = std::move(t);
  }

  int dim_;
  int points_;
  double length_;
  std::shared_ptr<const Tables> tables_;
};

inline Grid make_grid(int dim, int points, double length) { return Grid(dim, points, length); }

}  // namespace hpclab::spectral
