#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "hcss/error.hpp"

namespace hcss {

inline constexpr double kLlrClip = 50.0;

template <std::size_t N>
using Point = std::array<double, N>;

using Point4 = Point<4>;

// Constellation point with its prior and m-bit label (bit 0 is the MSB).
template <std::size_t N>
struct LabeledPoint {
  Point<N> x;
  double prior = 0.0;
  std::uint32_t label = 0;
};

inline bool label_bit(std::uint32_t label, std::size_t i, std::size_t m) { return (label >> (m - 1 - i)) & 1u; }

// Bit LLRs log(P(b=1|y)/P(b=0|y)) under the circularly symmetric Gaussian
// auxiliary channel exp(-|y-x|^2/sigma2), by log-sum-exp over every point.
template <std::size_t N>
std::vector<double> llr(const Point<N>& y, std::span<const LabeledPoint<N>> constellation, std::size_t m,
                        double sigma2) {
  if (!(sigma2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "noise variance must be positive");
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  std::vector<double> metric(constellation.size(), ninf);
  for (std::size_t j = 0; j < constellation.size(); ++j) {
    const auto& p = constellation[j];
    if (p.prior <= 0.0) continue;
    double d2 = 0.0;
    for (std::size_t d = 0; d < N; ++d) d2 += (y[d] - p.x[d]) * (y[d] - p.x[d]);
    metric[j] = std::log(p.prior) - d2 / sigma2;
  }
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    double mx[2] = {ninf, ninf};
    for (std::size_t j = 0; j < constellation.size(); ++j) {
      const int b = label_bit(constellation[j].label, i, m);
      mx[b] = std::max(mx[b], metric[j]);
    }
    double s[2] = {0.0, 0.0};
    for (std::size_t j = 0; j < constellation.size(); ++j) {
      const int b = label_bit(constellation[j].label, i, m);
      if (metric[j] != ninf) s[b] += std::exp(metric[j] - mx[b]);
    }
    double v;
    if (mx[1] == ninf && mx[0] == ninf) {
      v = 0.0;
    } else if (mx[1] == ninf) {
      v = -kLlrClip;
    } else if (mx[0] == ninf) {
      v = kLlrClip;
    } else {
      v = (mx[1] + std::log(s[1])) - (mx[0] + std::log(s[0]));
    }
    out[i] = std::clamp(v, -kLlrClip, kLlrClip);
  }
  return out;
}

// log2(1 + exp(-(2b-1) llr)): the per-bit estimate of H(B|Y).
inline double bit_cost(double llr_value, bool bit) {
  const double z = bit ? -llr_value : llr_value;
  // softplus(z) / ln 2
  const double sp = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  return sp / std::log(2.0);
}

// Exact bit-metric demapper for 4D symbols built from n amplitude levels per
// quadrature, when the adjusted constellation is separable: the received
// centroid of each quadrature depends only on that quadrature's signed level.
// The prior is the quadrant law P_{A^4} (signs uniform). Output bit order per
// quadrature: sign, then the Gray bits of the amplitude index MSB first.
class SeparableDemapper4D {
 public:
  // centroids[q][s*n + k]: position of signed level (s: 1 = negative) in quadrature q.
  SeparableDemapper4D(std::size_t levels, std::vector<double> quadrant_prior,
                      std::array<std::vector<double>, 4> centroids, double sigma2)
      : n_(levels), prior_(std::move(quadrant_prior)), centroids_(std::move(centroids)), sigma2_(sigma2) {
    if (!(sigma2_ > 0.0)) throw Error(ErrorCode::InvalidArgument, "noise variance must be positive");
    if (n_ < 2 || n_ > 16 || (n_ & (n_ - 1)) != 0) {
      throw Error(ErrorCode::InvalidArgument, "separable demapper needs 2..16 levels, a power of two");
    }
    if (prior_.size() != n_ * n_ * n_ * n_) throw Error(ErrorCode::InvalidArgument, "quadrant prior has wrong size");
    for (const auto& c : centroids_) {
      if (c.size() != 2 * n_) throw Error(ErrorCode::InvalidArgument, "centroid table has wrong size");
    }
    amp_bits_ = 0;
    while ((std::size_t{1} << amp_bits_) < n_) ++amp_bits_;
  }

  std::size_t levels() const noexcept { return n_; }
  std::size_t bits_per_symbol() const noexcept { return 4 * (amp_bits_ + 1); }
  double sigma2() const noexcept { return sigma2_; }

  void demap(const Point4& y, std::span<double> out) const {
    std::array<std::array<double, 32>, 4> g{};
    std::array<std::array<double, 16>, 4> h{};
    for (std::size_t q = 0; q < 4; ++q) {
      double best = std::numeric_limits<double>::infinity();
      std::array<double, 32> e{};
      for (std::size_t j = 0; j < 2 * n_; ++j) {
        const double d = y[q] - centroids_[q][j];
        e[j] = d * d;
        best = std::min(best, e[j]);
      }
      for (std::size_t j = 0; j < 2 * n_; ++j) g[q][j] = std::exp(-(e[j] - best) / sigma2_);
      for (std::size_t k = 0; k < n_; ++k) h[q][k] = g[q][k] + g[q][n_ + k];
    }

    // marg[q][k]: sum over the other quadratures' amplitudes of prior * their h.
    std::array<std::array<double, 16>, 4> marg{};
    const std::size_t n = n_;
    std::size_t cell = 0;
    for (std::size_t k0 = 0; k0 < n; ++k0) {
      for (std::size_t k1 = 0; k1 < n; ++k1) {
        const double h01 = h[0][k0] * h[1][k1];
        for (std::size_t k2 = 0; k2 < n; ++k2) {
          for (std::size_t k3 = 0; k3 < n; ++k3, ++cell) {
            const double p = prior_[cell];
            if (p == 0.0) continue;
            const double h23 = h[2][k2] * h[3][k3];
            marg[0][k0] += p * h[1][k1] * h23;
            marg[1][k1] += p * h[0][k0] * h23;
            marg[2][k2] += p * h01 * h[3][k3];
            marg[3][k3] += p * h01 * h[2][k2];
          }
        }
      }
    }

    const std::size_t per_q = amp_bits_ + 1;
    for (std::size_t q = 0; q < 4; ++q) {
      double pos = 0.0, neg = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        pos += g[q][k] * marg[q][k];
        neg += g[q][n + k] * marg[q][k];
      }
      out[q * per_q] = ratio_llr(neg, pos);
      for (std::size_t b = 0; b < amp_bits_; ++b) {
        const std::size_t shift = amp_bits_ - 1 - b;
        double one = 0.0, zero = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double mass = h[q][k] * marg[q][k];
          const unsigned gk = static_cast<unsigned>(k ^ (k >> 1));
          if ((gk >> shift) & 1u) {
            one += mass;
          } else {
            zero += mass;
          }
        }
        out[q * per_q + 1 + b] = ratio_llr(one, zero);
      }
    }
  }

 private:
  static double ratio_llr(double one, double zero) {
    if (one <= 0.0 && zero <= 0.0) return 0.0;
    if (one <= 0.0) return -kLlrClip;
    if (zero <= 0.0) return kLlrClip;
    return std::clamp(std::log(one) - std::log(zero), -kLlrClip, kLlrClip);
  }

  std::size_t n_;
  std::vector<double> prior_;
  std::array<std::vector<double>, 4> centroids_;
  double sigma2_;
  std::size_t amp_bits_ = 0;
};

}  // namespace hcss
