#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hpclab/spectral/field.hpp"

namespace hpclab::spectral {

inline constexpr double kChiInner = 3.0 / 4.0;
inline constexpr double kChiOuter = 4.0 / 3.0;

/// Radial cutoff: 1 on [0, 3/4], 0 on [4/3, inf), quintic smoothstep between.
inline double cutoff_profile(double r) {
  if (r <= kChiInner) return 1.0;
  if (r >= kChiOuter) return 0.0;
  const double t = (r - kChiInner) / (kChiOuter - kChiInner);
  return 1.0 - t * t * t * (t * (t * 6.0 - 15.0) + 10.0);
}

/// Ring profile chi(r/2) - chi(r), supported in [3/4, 8/3].
inline double ring_profile(double r) { return cutoff_profile(0.5 * r) - cutoff_profile(r); }

inline double ring_weight(int j, double xi) { return ring_profile(std::ldexp(xi, -j)); }

/// Active block range of a grid: the levels whose ring meets some nonzero
/// grid wavenumber.
struct DyadicDecomposition {
  int j_min = 0;
  int j_max = 0;

  static DyadicDecomposition for_grid(const Grid& g) {
    DyadicDecomposition d;
    d.j_min = static_cast<int>(std::floor(std::log2(3.0 * g.min_wavenumber() / 8.0))) + 1;
    d.j_max = static_cast<int>(std::ceil(std::log2(4.0 * g.max_wavenumber() / 3.0))) - 1;
    return d;
  }

  bool in_range(int j) const { return j >= j_min - 2 && j <= j_max + 2; }
};

/// Floor(-log2 eps) + k.
inline int compute_threshold(double eps, int k) {
  if (!(eps > 0.0 && eps <= 1.0)) {
    throw std::invalid_argument("threshold needs 0 < eps <= 1, got " + std::to_string(eps));
  }
  return static_cast<int>(std::floor(-std::log2(eps))) + k;
}

inline SpectralField dyadic_block(const SpectralField& f, int j) {
  const Grid& g = f.grid();
  SpectralField out(g, f.components());
  if (!DyadicDecomposition::for_grid(g).in_range(j)) return out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double xi = g.wavenumber(i);
    if (xi == 0.0) continue;
    const double w = ring_weight(j, xi);
    if (w == 0.0) continue;
    for (int c = 0; c < f.components(); ++c) out(c, i) = w * f(c, i);
  }
  return out;
}

/// Low-frequency cutoff chi(2^{-j} xi), mean included.
inline SpectralField low_pass(const SpectralField& f, int j) {
  const Grid& g = f.grid();
  SpectralField out(g, f.components());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = cutoff_profile(std::ldexp(g.wavenumber(i), -j));
    if (w == 0.0) continue;
    for (int c = 0; c < f.components(); ++c) out(c, i) = w * f(c, i);
  }
  return out;
}

struct BlockNorm {
  int j;
  double l2;
};

/// ||Delta_j f||_{L^2} for every active j, computed from coefficients.
inline std::vector<BlockNorm> block_norms(const SpectralField& f) {
  const Grid& g = f.grid();
  const auto dec = DyadicDecomposition::for_grid(g);
  const int count = dec.j_max - dec.j_min + 1;
  std::vector<double> sums(count, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double xi = g.wavenumber(i);
    if (xi == 0.0) continue;
    double mass = 0.0;
    for (int c = 0; c < f.components(); ++c) mass += std::norm(f(c, i));
    if (mass == 0.0) continue;
    // A ring of level j covers (3/4 2^j, 8/3 2^j); at most two levels hit xi.
    const int top = static_cast<int>(std::floor(std::log2(xi / kChiInner)));
    for (int j = top - 2; j <= top + 1; ++j) {
      if (j < dec.j_min || j > dec.j_max) continue;
      const double w = ring_weight(j, xi);
      if (w != 0.0) sums[j - dec.j_min] += w * w * mass;
    }
  }
  std::vector<BlockNorm> out(count);
  for (int k = 0; k < count; ++k) out[k] = {dec.j_min + k, std::sqrt(g.volume() * sums[k])};
  return out;
}

enum class Summability { one, infinity };

inline double weighted_sum(const std::vector<BlockNorm>& blocks, double s, Summability r, int j_lo, int j_hi) {
  double acc = 0.0;
  for (const auto& b : blocks) {
    if (b.j < j_lo || b.j > j_hi) continue;
    const double v = std::exp2(b.j * s) * b.l2;
    acc = r == Summability::one ? acc + v : std::max(acc, v);
  }
  return acc;
}

inline double besov_norm(const std::vector<BlockNorm>& blocks, double s, Summability r) {
  return weighted_sum(blocks, s, r, std::numeric_limits<int>::min(), std::numeric_limits<int>::max());
}

/// Homogeneous Besov norm B^s_{2,r}: weighted l^r sum of block L^2 norms.
inline double besov_norm(const SpectralField& f, double s, Summability r = Summability::one) {
  return besov_norm(block_norms(f), s, r);
}

struct HybridNorm {
  double low = 0.0;
  double high = 0.0;
};

/// Low part sums j <= J, high part sums j >= J - 1.
inline HybridNorm hybrid_norm(const std::vector<BlockNorm>& blocks, double s_low, double s_high, Summability r,
                              int threshold) {
  return {weighted_sum(blocks, s_low, r, std::numeric_limits<int>::min(), threshold),
          weighted_sum(blocks, s_high, r, threshold - 1, std::numeric_limits<int>::max())};
}

inline HybridNorm hybrid_norm(const SpectralField& f, double s_low, double s_high, Summability r, int threshold) {
  return hybrid_norm(block_norms(f), s_low, s_high, r, threshold);
}

/// Per-block table with columns j, 2^j, block_L2, weighted = 2^{js} block_L2.
inline void write_block_table(std::ostream& os, const std::vector<BlockNorm>& blocks, double s) {
  os << "j,2^j,block_L2,weighted\n";
  os.precision(17);
  for (const auto& b : blocks) {
    os << b.j << ',' << std::exp2(b.j) << ',' << b.l2 << ',' << std::exp2(b.j * s) * b.l2 << '\n';
  }
}

}  // namespace hpclab::spectral
