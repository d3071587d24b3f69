#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <vector>

#include "hcss/alphabet.hpp"
#include "hcss/bigint.hpp"
#include "hcss/codebook.hpp"
#include "hcss/error.hpp"
#include "hcss/multiset_rank.hpp"

namespace hcss {

// Quadrature order within a 4D symbol.
enum Quadrature : std::size_t { XI = 0, XQ = 1, YI = 2, YQ = 3 };

using Symbol4 = std::array<int, 4>;

struct FourDSymbolBlock {
  std::vector<Symbol4> symbols;
  int mapping_dim = 4;
};

inline void check_mapping_dim(int dim) {
  if (dim != 1 && dim != 2 && dim != 4) throw Error(ErrorCode::InvalidArgument, "mapping dimension must be 1, 2 or 4");
}

// Number of amplitude sequences feeding one block.
inline std::size_t lanes_for(int dim) {
  check_mapping_dim(dim);
  return static_cast<std::size_t>(4 / dim);
}

// Source sequence of quadrature q.
inline std::size_t lane_of(int dim, std::size_t q) { return q / static_cast<std::size_t>(dim); }

// Position inside that sequence of the amplitude carried by quadrature q in `slot`.
inline std::size_t lane_position(int dim, std::size_t slot, std::size_t q) {
  return slot * static_cast<std::size_t>(dim) + q % static_cast<std::size_t>(dim);
}

// Places signed amplitudes on the four quadratures. Sign bit 1 means negative;
// four sign bits are consumed per symbol in quadrature order.
inline FourDSymbolBlock map_symbols(std::span<const std::vector<int>> seqs, std::span<const std::uint8_t> signs,
                                    int dim) {
  const std::size_t lanes = lanes_for(dim);
  if (seqs.size() != lanes) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(dim) + "D mapping needs " + std::to_string(lanes) +
                                               " sequences, got " + std::to_string(seqs.size()));
  }
  const std::size_t len = seqs[0].size();
  for (const auto& s : seqs) {
    if (s.size() != len) throw Error(ErrorCode::LengthMismatch, "sequence lengths differ");
  }
  if (len % static_cast<std::size_t>(dim) != 0) {
    throw Error(ErrorCode::DivisibilityViolation, "L=" + std::to_string(len) + " not divisible by " +
                                                      std::to_string(dim));
  }
  const std::size_t slots = len / static_cast<std::size_t>(dim);
  if (signs.size() < 4 * slots) throw Error(ErrorCode::LengthMismatch, "sign source holds too few bits");
  FourDSymbolBlock block;
  block.mapping_dim = dim;
  block.symbols.resize(slots);
  for (std::size_t t = 0; t < slots; ++t) {
    for (std::size_t q = 0; q < 4; ++q) {
      const int a = seqs[lane_of(dim, q)][lane_position(dim, t, q)];
      block.symbols[t][q] = signs[4 * t + q] ? -a : a;
    }
  }
  return block;
}

inline FourDSymbolBlock map_symbols(std::span<const AmplitudeSequence> seqs, std::span<const std::uint8_t> signs,
                                    int dim) {
  std::vector<std::vector<int>> raw;
  raw.reserve(seqs.size());
  for (const auto& s : seqs) raw.push_back(s.amplitudes);
  return map_symbols(std::span<const std::vector<int>>(raw), signs, dim);
}

inline void write_symbols_csv(std::ostream& os, const FourDSymbolBlock& block, std::size_t first_slot = 0,
                              bool header = true) {
  if (header) os << "slot,XI,XQ,YI,YQ\n";
  for (std::size_t t = 0; t < block.symbols.size(); ++t) {
    const auto& s = block.symbols[t];
    os << first_slot + t << ',' << s[0] << ',' << s[1] << ',' << s[2] << ',' << s[3] << '\n';
  }
}

// Per-quadrature labels: sign bit first (1 = negative), then the binary
// reflected Gray code of the amplitude index. For {1,3,5,7}: 00,01,11,10.
inline std::size_t bits_per_component(const AmplitudeAlphabet& alphabet) {
  std::size_t b = 0;
  while ((std::size_t{1} << b) < alphabet.size()) ++b;
  if ((std::size_t{1} << b) != alphabet.size()) {
    throw Error(ErrorCode::InvalidArgument, "bit labeling needs a power-of-two alphabet");
  }
  return b + 1;
}

inline unsigned gray(unsigned i) { return i ^ (i >> 1); }

inline unsigned component_label(std::size_t amplitude_index, bool negative, std::size_t amp_bits) {
  return (static_cast<unsigned>(negative) << amp_bits) | gray(static_cast<unsigned>(amplitude_index));
}

// Exact probability table over D-tuples of amplitude indices; tuple
// (k_1..k_D) lives at index sum k_l * n^(D-l).
class PmfTable {
 public:
  PmfTable(AmplitudeAlphabet alphabet, int dim, std::vector<BigRational> probs)
      : alphabet_(std::move(alphabet)), dim_(dim), probs_(std::move(probs)) {
    check_mapping_dim(dim_);
    std::size_t cells = 1;
    for (int i = 0; i < dim_; ++i) cells *= alphabet_.size();
    if (probs_.size() != cells) throw Error(ErrorCode::InvalidArgument, "PMF table has wrong cell count");
  }

  const AmplitudeAlphabet& alphabet() const noexcept { return alphabet_; }
  int dimension() const noexcept { return dim_; }
  std::size_t cells() const noexcept { return probs_.size(); }
  const std::vector<BigRational>& probabilities() const noexcept { return probs_; }
  const BigRational& operator[](std::size_t cell) const { return probs_.at(cell); }

  const BigRational& at(std::span<const std::size_t> idx) const {
    std::size_t cell = 0;
    for (auto k : idx) cell = cell * alphabet_.size() + k;
    return probs_.at(cell);
  }

  BigRational total() const {
    BigRational s = 0;
    for (const auto& p : probs_) s += p;
    return s;
  }

  std::vector<double> to_double() const {
    std::vector<double> out(probs_.size());
    for (std::size_t i = 0; i < probs_.size(); ++i) out[i] = hcss::to_double(probs_[i]);
    return out;
  }

  // Entropy of the D-dimensional amplitude tuple, bits.
  double entropy_bits() const {
    double h = 0.0;
    for (const auto& p : probs_) {
      const double v = hcss::to_double(p);
      if (v > 0.0) h -= v * std::log2(v);
    }
    return h;
  }

  // Marginal of coordinate `coord` as a 1D table.
  PmfTable marginal(int coord) const {
    const std::size_t n = alphabet_.size();
    std::vector<BigRational> m(n, BigRational(0));
    for (std::size_t cell = 0; cell < probs_.size(); ++cell) {
      std::size_t rest = cell;
      std::size_t k = 0;
      for (int l = dim_ - 1; l >= 0; --l) {
        if (l == coord) k = rest % n;
        rest /= n;
      }
      m[k] += probs_[cell];
    }
    return PmfTable(alphabet_, 1, std::move(m));
  }

 private:
  AmplitudeAlphabet alphabet_;
  int dim_;
  std::vector<BigRational> probs_;
};

struct WeightedComposition {
  Composition composition;
  BigCount weight;
};

// Mixture over compositions of the law of D consecutive amplitudes drawn
// from a uniformly permuted sequence: prod_l [c_{k_l} - #{m<l: k_m=k_l}]
// over L(L-1)...(L-D+1), clamped at zero, weighted by weight / sum(weights).
inline PmfTable pmf_mixture(const AmplitudeAlphabet& alphabet, std::size_t length, int dim,
                            std::span<const WeightedComposition> parts) {
  check_mapping_dim(dim);
  if (length < static_cast<std::size_t>(dim)) {
    throw Error(ErrorCode::DegenerateLength, "L=" + std::to_string(length) + " is shorter than D");
  }
  const std::size_t n = alphabet.size();
  std::size_t cells = 1;
  for (int i = 0; i < dim; ++i) cells *= n;

  // Per distinct weight, accumulate the small integer numerators natively.
  std::map<BigCount, std::vector<__int128>> by_weight;
  BigCount weight_sum = 0;
  std::vector<std::size_t> idx(static_cast<std::size_t>(dim));
  for (const auto& part : parts) {
    if (part.composition.length() != length || part.composition.counts.size() != n) {
      throw Error(ErrorCode::InvalidArgument, "composition shape does not match the table");
    }
    weight_sum += part.weight;
    auto& acc = by_weight.try_emplace(part.weight, cells, 0).first->second;
    const auto& c = part.composition.counts;
    for (std::size_t cell = 0; cell < cells; ++cell) {
      std::size_t rest = cell;
      for (int l = dim - 1; l >= 0; --l) {
        idx[static_cast<std::size_t>(l)] = rest % n;
        rest /= n;
      }
      long long prod = 1;
      for (int l = 0; l < dim; ++l) {
        long long repeats = 0;
        for (int m = 0; m < l; ++m) repeats += idx[static_cast<std::size_t>(m)] == idx[static_cast<std::size_t>(l)];
        prod *= static_cast<long long>(c[idx[static_cast<std::size_t>(l)]]) - repeats;
      }
      if (prod > 0) acc[cell] += prod;
    }
  }
  if (weight_sum == 0) throw Error(ErrorCode::InvalidArgument, "mixture has zero total weight");

  BigCount falling = 1;
  for (int l = 0; l < dim; ++l) falling *= (length - static_cast<std::size_t>(l));
  const BigCount denom = falling * weight_sum;
  std::vector<BigCount> num(cells, BigCount(0));
  for (const auto& [w, acc] : by_weight) {
    for (std::size_t cell = 0; cell < cells; ++cell) {
      if (acc[cell] != 0) num[cell] += w * WordTraits<uint128_t>::to_big(static_cast<uint128_t>(acc[cell]));
    }
  }
  std::vector<BigRational> probs(cells);
  for (std::size_t cell = 0; cell < cells; ++cell) probs[cell] = BigRational(num[cell], denom);
  return PmfTable(alphabet, dim, std::move(probs));
}

inline std::vector<WeightedComposition> codebook_weights(const ShaperCodebook& cb) {
  std::vector<WeightedComposition> parts;
  parts.reserve(cb.size());
  for (const auto& e : cb.entries()) parts.push_back({e.composition, e.n_seq});
  return parts;
}

inline PmfTable pmf_nd(const ShaperCodebook& cb, int dim) {
  const auto parts = codebook_weights(cb);
  return pmf_mixture(cb.alphabet(), cb.length(), dim, parts);
}

inline PmfTable pmf_1d(const ShaperCodebook& cb) { return pmf_nd(cb, 1); }
inline PmfTable pmf_2d(const ShaperCodebook& cb) { return pmf_nd(cb, 2); }
inline PmfTable pmf_4d(const ShaperCodebook& cb) { return pmf_nd(cb, 4); }

// P_{A^4} of a 4D amplitude-index quadruple under the table's mapping.
inline BigRational quadrant_probability(const PmfTable& pmf, const std::array<std::size_t, 4>& k) {
  switch (pmf.dimension()) {
    case 1: return pmf[k[0]] * pmf[k[1]] * pmf[k[2]] * pmf[k[3]];
    case 2: {
      const std::size_t n = pmf.alphabet().size();
      return pmf[k[0] * n + k[1]] * pmf[k[2] * n + k[3]];
    }
    default: return pmf.at(k);
  }
}

// P_X of a signed 4D point: uniform signs times the quadrant law.
inline BigRational symbol_probability(const PmfTable& pmf, const Symbol4& x) {
  std::array<std::size_t, 4> k{};
  for (std::size_t q = 0; q < 4; ++q) {
    k[q] = pmf.alphabet().index_of(std::abs(x[q]));
    if (k[q] == pmf.alphabet().size()) throw Error(ErrorCode::InvalidArgument, "component outside alphabet");
  }
  return quadrant_probability(pmf, k) / 16;
}

// Quadrant law expanded to n^4 doubles, index k1*n^3 + k2*n^2 + k3*n + k4.
inline std::vector<double> quadrant_table(const PmfTable& pmf) {
  const std::size_t n = pmf.alphabet().size();
  const auto p = pmf.to_double();
  std::vector<double> out(n * n * n * n);
  for (std::size_t cell = 0; cell < out.size(); ++cell) {
    const std::array<std::size_t, 4> k{cell / (n * n * n), (cell / (n * n)) % n, (cell / n) % n, cell % n};
    switch (pmf.dimension()) {
      case 1: out[cell] = p[k[0]] * p[k[1]] * p[k[2]] * p[k[3]]; break;
      case 2: out[cell] = p[k[0] * n + k[1]] * p[k[2] * n + k[3]]; break;
      default: out[cell] = p[cell]; break;
    }
  }
  return out;
}

// Entropy of the signed 4D signal: 4 sign bits plus (4/D) H(A^D).
inline double signal_entropy_b4d(const PmfTable& pmf) { return 4.0 + (4.0 / pmf.dimension()) * pmf.entropy_bits(); }

// Frequencies of D-tuples of amplitudes as they sit in the 4D symbols.
inline PmfTable empirical_pmf(std::span<const FourDSymbolBlock> blocks, int dim, const AmplitudeAlphabet& alphabet) {
  check_mapping_dim(dim);
  const std::size_t n = alphabet.size();
  std::size_t cells = 1;
  for (int i = 0; i < dim; ++i) cells *= n;
  std::vector<std::uint64_t> counts(cells, 0);
  std::uint64_t total = 0;
  for (const auto& b : blocks) {
    for (const auto& s : b.symbols) {
      for (std::size_t q0 = 0; q0 < 4; q0 += static_cast<std::size_t>(dim)) {
        std::size_t cell = 0;
        for (std::size_t q = q0; q < q0 + static_cast<std::size_t>(dim); ++q) {
          const auto k = alphabet.index_of(std::abs(s[q]));
          if (k == n) throw Error(ErrorCode::InvalidArgument, "component outside alphabet");
          cell = cell * n + k;
        }
        ++counts[cell];
        ++total;
      }
    }
  }
  if (total == 0) throw Error(ErrorCode::InsufficientData, "no symbols to count");
  std::vector<BigRational> probs(cells);
  for (std::size_t i = 0; i < cells; ++i) probs[i] = BigRational(BigCount(counts[i]), BigCount(total));
  return PmfTable(alphabet, dim, std::move(probs));
}

inline double total_variation(const PmfTable& a, const PmfTable& b) {
  if (a.cells() != b.cells()) throw Error(ErrorCode::InvalidArgument, "PMF tables differ in size");
  double tv = 0.0;
  for (std::size_t i = 0; i < a.cells(); ++i) tv += std::abs(hcss::to_double(a[i]) - hcss::to_double(b[i]));
  return 0.5 * tv;
}

}  // namespace hcss
