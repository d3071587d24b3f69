#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "hcss/alphabet.hpp"
#include "hcss/error.hpp"

namespace hcss {

// Seeded generator used by every sampler; seeding goes through seed_seq so
// nearby seeds give unrelated streams.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

inline double entropy_bits(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

struct MbDistribution {
  double lambda = 0.0;
  std::vector<int> support;
  std::vector<double> probabilities;
  double entropy_bits = 0.0;

  // E[a^2] per amplitude.
  double average_energy() const {
    double e = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) e += probabilities[i] * support[i] * support[i];
    return e;
  }
};

// P(a) proportional to exp(-lambda a^2).
inline MbDistribution mb_distribution(double lambda, const std::vector<int>& support) {
  MbDistribution d;
  d.lambda = lambda;
  d.support = support;
  d.probabilities.resize(support.size());
  const double a0 = static_cast<double>(support.front()) * support.front();
  double z = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    d.probabilities[i] = std::exp(-lambda * (static_cast<double>(support[i]) * support[i] - a0));
    z += d.probabilities[i];
  }
  for (auto& p : d.probabilities) p /= z;
  d.entropy_bits = hcss::entropy_bits(d.probabilities);
  return d;
}

// Bisection on lambda; entropy falls strictly as lambda grows.
inline MbDistribution fit_mb(double target_entropy, const std::vector<int>& support) {
  const double hmax = std::log2(static_cast<double>(support.size()));
  if (!(target_entropy > 0.0) || target_entropy > hmax + 1e-12) {
    throw Error(ErrorCode::TargetInfeasible, "MB target entropy must lie in (0, log2|support|]");
  }
  if (target_entropy >= hmax - 1e-12) return mb_distribution(0.0, support);
  double lo = 0.0;
  double hi = 1e-3;
  while (mb_distribution(hi, support).entropy_bits > target_entropy) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw Error(ErrorCode::TargetInfeasible, "MB target entropy too small to resolve");
  }
  MbDistribution mid;
  for (int it = 0; it < 400; ++it) {
    const double m = 0.5 * (lo + hi);
    mid = mb_distribution(m, support);
    if (std::abs(mid.entropy_bits - target_entropy) < 1e-12 || hi - lo < 1e-16 * hi) break;
    if (mid.entropy_bits > target_entropy) {
      lo = m;
    } else {
      hi = m;
    }
  }
  if (std::abs(mid.entropy_bits - target_entropy) >= 1e-9) {
    throw Error(ErrorCode::TargetInfeasible, "MB entropy bisection did not converge");
  }
  return mid;
}

inline MbDistribution fit_mb(double target_entropy, const AmplitudeAlphabet& alphabet) {
  return fit_mb(target_entropy, alphabet.levels());
}

// MB over the positive odd integers: the support grows until the mass beyond
// it is below 1e-12.
inline MbDistribution fit_mb_unconstrained(double target_entropy) {
  std::size_t n = 8;
  for (;;) {
    std::vector<int> support(n);
    for (std::size_t i = 0; i < n; ++i) support[i] = static_cast<int>(2 * i + 1);
    auto d = fit_mb(target_entropy, support);
    double tail = 0.0;
    double z = 0.0;
    for (std::size_t i = 0; i < 4 * n; ++i) {
      const double a = 2.0 * static_cast<double>(i) + 1.0;
      const double w = std::exp(-d.lambda * (a * a - 1.0));
      z += w;
      if (i >= n) tail += w;
    }
    if (tail / z < 1e-12) return d;
    n *= 2;
  }
}

inline std::vector<int> sample_mb(const MbDistribution& dist, std::size_t n, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::discrete_distribution<std::size_t> pick(dist.probabilities.begin(), dist.probabilities.end());
  std::vector<int> out(n);
  for (auto& a : out) a = dist.support[pick(rng)];
  return out;
}

inline std::vector<int> sample_uniform(const AmplitudeAlphabet& alphabet, std::size_t n, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::vector<int> out(n);
  for (auto& a : out) a = alphabet[pick(rng)];
  return out;
}

}  // namespace hcss
