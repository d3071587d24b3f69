#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hcss/codecs.hpp"
#include "hcss/metrics.hpp"
#include "hcss/symbol_mapping.hpp"
#include "oracles.hpp"

using namespace hcss;

namespace {

PmfTable single_shell(int dim) {
  const std::vector<WeightedComposition> parts{{Composition{6, 5, 3, 2}, 1}};
  return pmf_mixture(AmplitudeAlphabet{}, 16, dim, parts);
}

std::string six_decimals(const BigRational& q) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(6);
  os << to_double(q);
  return os.str();
}

// D-tuple law built by walking every permutation of every selected shell.
std::vector<BigRational> permutation_ensemble(const std::vector<int>& levels, std::size_t L, std::size_t k,
                                              std::size_t D) {
  const std::size_t n = levels.size();
  std::size_t cells = 1;
  for (std::size_t i = 0; i < D; ++i) cells *= n;
  std::vector<BigRational> out(cells, BigRational(0));
  for (const auto& sel : oracle::dyadic_greedy(levels, L, k)) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i) s.insert(s.end(), sel.counts[i], i);
    const std::uint64_t perms = oracle::multinomial(sel.counts);
    const BigRational w = BigRational(BigCount(sel.n_seq), pow2(k) * perms * (L / D));
    do {
      for (std::size_t b = 0; b + D <= L; b += D) {
        std::size_t cell = 0;
        for (std::size_t j = 0; j < D; ++j) cell = cell * n + s[b + j];
        out[cell] += w;
      }
    } while (std::next_permutation(s.begin(), s.end()));
  }
  return out;
}

}  // namespace

TEST(MapSymbols, OneDimensionalLaneRead) {
  const std::vector<std::vector<int>> seqs{{1}, {3}, {5}, {7}};
  const std::vector<std::uint8_t> signs{0, 0, 0, 0};
  const auto b = map_symbols(std::span<const std::vector<int>>(seqs), signs, 1);
  ASSERT_EQ(b.symbols.size(), 1u);
  EXPECT_EQ(b.symbols[0], (Symbol4{1, 3, 5, 7}));
  EXPECT_EQ(b.mapping_dim, 1);
}

TEST(MapSymbols, FourDimensionalQuadruple) {
  const std::vector<std::vector<int>> seqs{{1, 3, 5, 7}};
  const std::vector<std::uint8_t> signs{0, 1, 0, 1};
  const auto b = map_symbols(std::span<const std::vector<int>>(seqs), signs, 4);
  ASSERT_EQ(b.symbols.size(), 1u);
  EXPECT_EQ(b.symbols[0], (Symbol4{1, -3, 5, -7}));
}

TEST(MapSymbols, TwoDimensionalPairs) {
  const std::vector<std::vector<int>> seqs{{1, 3}, {5, 7}};
  const std::vector<std::uint8_t> signs{1, 0, 0, 1};
  const auto b = map_symbols(std::span<const std::vector<int>>(seqs), signs, 2);
  ASSERT_EQ(b.symbols.size(), 1u);
  EXPECT_EQ(b.symbols[0], (Symbol4{-1, 3, 5, -7}));
}

TEST(MapSymbols, LongerBlocksFollowLaneOrder) {
  const std::vector<std::vector<int>> s1{{1, 3, 5, 7}, {3, 3, 1, 1}, {5, 1, 1, 1}, {7, 7, 7, 1}};
  const std::vector<std::uint8_t> signs(16, 0);
  const auto b1 = map_symbols(std::span<const std::vector<int>>(s1), signs, 1);
  ASSERT_EQ(b1.symbols.size(), 4u);
  EXPECT_EQ(b1.symbols[2], (Symbol4{5, 1, 1, 7}));
  const std::vector<std::vector<int>> s2{{1, 3, 5, 7}, {3, 3, 1, 1}};
  const auto b2 = map_symbols(std::span<const std::vector<int>>(s2), signs, 2);
  ASSERT_EQ(b2.symbols.size(), 2u);
  EXPECT_EQ(b2.symbols[1], (Symbol4{5, 7, 1, 1}));
  const std::vector<std::vector<int>> s4{{1, 3, 5, 7, 3, 3, 1, 1}};
  const auto b4 = map_symbols(std::span<const std::vector<int>>(s4), signs, 4);
  ASSERT_EQ(b4.symbols.size(), 2u);
  EXPECT_EQ(b4.symbols[1], (Symbol4{3, 3, 1, 1}));
}

TEST(MapSymbols, Errors) {
  auto code = [](const std::vector<std::vector<int>>& seqs, std::size_t nsigns, int dim) {
    try {
      map_symbols(std::span<const std::vector<int>>(seqs), std::vector<std::uint8_t>(nsigns, 0), dim);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code({{1, 3}, {5}}, 8, 2), ErrorCode::LengthMismatch);
  EXPECT_EQ(code({{1, 3}}, 8, 2), ErrorCode::LengthMismatch);
  EXPECT_EQ(code({{1, 3, 5}, {1, 1, 1}}, 8, 2), ErrorCode::DivisibilityViolation);
  EXPECT_EQ(code({{1, 3, 5, 7, 1, 1}}, 8, 4), ErrorCode::DivisibilityViolation);
  EXPECT_EQ(code({{1, 3}, {5, 7}}, 3, 2), ErrorCode::LengthMismatch);
  EXPECT_EQ(code({{1}, {1}, {1}}, 4, 3), ErrorCode::InvalidArgument);
}

TEST(MapSymbols, CsvExport) {
  const std::vector<std::vector<int>> s4{{1, 3, 5, 7, 3, 3, 1, 1}};
  const auto b = map_symbols(std::span<const std::vector<int>>(s4), std::vector<std::uint8_t>(8, 1), 4);
  std::ostringstream os;
  write_symbols_csv(os, b);
  EXPECT_EQ(os.str(), "slot,XI,XQ,YI,YQ\n0,-1,-3,-5,-7\n1,-3,-3,-1,-1\n");
}

TEST(SingleShellExample, SingleShellValues) {
  const Symbol4 x1{7, 7, 7, 7}, x2{1, 3, 5, 7};
  const auto p1 = single_shell(1), p2 = single_shell(2), p4 = single_shell(4);
  // Closed forms from the worked example.
  EXPECT_EQ(symbol_probability(p1, x1), BigRational(1, 16) * BigRational(2, 16) * BigRational(2, 16) *
                                            BigRational(2, 16) * BigRational(2, 16));
  EXPECT_EQ(symbol_probability(p2, x1), BigRational(1, 16) * BigRational(2, 16) * BigRational(1, 15) *
                                            BigRational(2, 16) * BigRational(1, 15));
  EXPECT_EQ(symbol_probability(p4, x1), BigRational(0));
  EXPECT_EQ(symbol_probability(p1, x2), BigRational(1, 16) * BigRational(6, 16) * BigRational(5, 16) *
                                            BigRational(3, 16) * BigRational(2, 16));
  EXPECT_EQ(symbol_probability(p2, x2), BigRational(1, 16) * BigRational(6, 16) * BigRational(5, 15) *
                                            BigRational(3, 16) * BigRational(2, 15));
  EXPECT_EQ(symbol_probability(p4, x2), BigRational(1, 16) * BigRational(6, 16) * BigRational(5, 15) *
                                            BigRational(3, 14) * BigRational(2, 13));
  EXPECT_EQ(six_decimals(symbol_probability(p1, x1)), "0.000015");
  EXPECT_EQ(six_decimals(symbol_probability(p2, x1)), "0.000004");
  EXPECT_EQ(six_decimals(symbol_probability(p4, x1)), "0.000000");
  EXPECT_EQ(six_decimals(symbol_probability(p1, x2)), "0.000172");
  EXPECT_EQ(six_decimals(symbol_probability(p2, x2)), "0.000195");
  EXPECT_EQ(six_decimals(symbol_probability(p4, x2)), "0.000258");
  // Signs do not change the law.
  EXPECT_EQ(symbol_probability(p4, Symbol4{-1, 3, -5, 7}), symbol_probability(p4, x2));
}

TEST(Pmf, NormalizedForCodebooks) {
  for (auto [L, k] : {std::pair{4, 7}, {8, 14}, {16, 28}, {32, 56}, {64, 112}}) {
    const auto cb = build_codebook(AmplitudeAlphabet{}, L, k);
    for (int d : {1, 2, 4}) {
      const auto p = pmf_nd(cb, d);
      EXPECT_EQ(p.total(), BigRational(1));
      for (const auto& q : p.probabilities()) EXPECT_GE(q, 0);
    }
  }
}

TEST(Pmf, OneDimensionalIsCountAverage) {
  const auto cb = build_codebook(AmplitudeAlphabet{}, 16, 28);
  const auto p = pmf_1d(cb);
  for (std::size_t a = 0; a < 4; ++a) {
    BigRational expect = 0;
    for (const auto& e : cb.entries()) expect += e.probability() * BigRational(e.composition.counts[a], 16);
    EXPECT_EQ(p[a], expect);
  }
}

TEST(Pmf, MatchesPermutationEnsemble) {
  AmplitudeAlphabet a;
  for (auto [L, k] : {std::pair{4, 7}, {4, 5}, {6, 9}, {8, 14}}) {
    for (std::size_t d : {1u, 2u, 4u}) {
      if (L % d != 0) continue;
      const auto ref = permutation_ensemble(a.levels(), L, k, d);
      const auto p = pmf_nd(build_codebook(a, L, k), static_cast<int>(d));
      for (std::size_t c = 0; c < ref.size(); ++c) ASSERT_EQ(p[c], ref[c]) << L << " " << k << " " << d << " " << c;
    }
  }
}

TEST(Pmf, MarginalsReproduceOneDimensional) {
  for (auto [L, k] : {std::pair{8, 14}, {16, 28}, {32, 56}}) {
    const auto cb = build_codebook(AmplitudeAlphabet{}, L, k);
    const auto p1 = pmf_1d(cb), p2 = pmf_2d(cb), p4 = pmf_4d(cb);
    for (int c = 0; c < 2; ++c) EXPECT_EQ(p2.marginal(c).probabilities(), p1.probabilities());
    for (int c = 0; c < 4; ++c) EXPECT_EQ(p4.marginal(c).probabilities(), p1.probabilities());
  }
}

TEST(Pmf, EntropyOrdering) {
  for (auto [L, k] : {std::pair{4, 7}, {8, 14}, {16, 28}, {32, 56}, {48, 84}}) {
    const auto cb = build_codebook(AmplitudeAlphabet{}, L, k);
    const auto p1 = pmf_1d(cb), p2 = pmf_2d(cb), p4 = pmf_4d(cb);
    EXPECT_LE(p4.entropy_bits(), 2 * p2.entropy_bits() + 1e-12);
    EXPECT_LE(2 * p2.entropy_bits(), 4 * p1.entropy_bits() + 1e-12);
    EXPECT_LE(rate_loss_b4d(p4, cb), rate_loss_b4d(p2, cb) + 1e-12);
    EXPECT_LE(rate_loss_b4d(p2, cb), rate_loss_b4d(p1, cb) + 1e-12);
  }
}

TEST(Pmf, FourDimensionalMappingLowersPeakProbability) {
  for (std::size_t L = 8; L <= 64; L += 4) {
    const auto cb = build_codebook(AmplitudeAlphabet{}, L, L * 7 / 4);
    const auto p1 = pmf_1d(cb), p4 = pmf_4d(cb);
    BigRational equal1 = 0, equal4 = 0;
    for (std::size_t a = 0; a < 4; ++a) {
      const std::array<std::size_t, 4> q{a, a, a, a};
      equal1 += quadrant_probability(p1, q);
      equal4 += quadrant_probability(p4, q);
    }
    EXPECT_LE(equal4, equal1) << "L=" << L;
    const std::array<std::size_t, 4> peak{3, 3, 3, 3};
    EXPECT_LE(quadrant_probability(p4, peak), quadrant_probability(p1, peak)) << "L=" << L;
  }
}

// Not every equal-amplitude quadruple loses mass: inner levels can gain, and
// at L=4 a sequence is a single symbol so whole shells land on one point.
TEST(Pmf, EqualQuadrupleExceptions) {
  const auto cb = build_codebook(AmplitudeAlphabet{}, 20, 35);
  const std::array<std::size_t, 4> q{1, 1, 1, 1};
  EXPECT_GT(quadrant_probability(pmf_4d(cb), q), quadrant_probability(pmf_1d(cb), q));
  const auto cb4 = build_codebook(AmplitudeAlphabet{}, 4, 7);
  BigRational equal1 = 0, equal4 = 0;
  for (std::size_t a = 0; a < 4; ++a) {
    const std::array<std::size_t, 4> e{a, a, a, a};
    equal1 += quadrant_probability(pmf_1d(cb4), e);
    equal4 += quadrant_probability(pmf_4d(cb4), e);
  }
  EXPECT_GT(equal4, equal1);
}

TEST(Pmf, DegenerateLength) {
  const auto cb = build_codebook(AmplitudeAlphabet{}, 2, 3);
  EXPECT_NO_THROW(pmf_2d(cb));
  try {
    pmf_4d(cb);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateLength);
  }
  EXPECT_THROW(pmf_2d(build_codebook(AmplitudeAlphabet{}, 1, 2)), Error);
}

TEST(Pmf, QuadrantTableMatchesExactProducts) {
  const auto cb = build_codebook(AmplitudeAlphabet{}, 16, 28);
  for (int d : {1, 2, 4}) {
    const auto p = pmf_nd(cb, d);
    const auto t = quadrant_table(p);
    double sum = 0;
    for (std::size_t cell = 0; cell < 256; ++cell) {
      const std::array<std::size_t, 4> k{cell / 64, (cell / 16) % 4, (cell / 4) % 4, cell % 4};
      EXPECT_NEAR(t[cell], to_double(quadrant_probability(p, k)), 1e-15);
      sum += t[cell];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_NEAR(signal_entropy_b4d(p), 4.0 + entropy_bits(t), 1e-9);
  }
}

TEST(Labels, GrayPerComponent) {
  AmplitudeAlphabet a;
  EXPECT_EQ(bits_per_component(a), 3u);
  const std::vector<unsigned> gray_expect{0b00, 0b01, 0b11, 0b10};
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(component_label(k, false, 2), gray_expect[k]);
    EXPECT_EQ(component_label(k, true, 2), 0b100u | gray_expect[k]);
  }
}

namespace {

// 10^7 4D symbols from the production-style encoder, in chunks of 10^6.
PmfTable empirical_hcss(const ShaperCodebook& cb, int dim, std::uint64_t seed) {
  const BasicShaper<std::uint64_t> shaper(cb);
  std::mt19937_64 rng(seed);
  std::size_t cells = 1;
  for (int i = 0; i < dim; ++i) cells *= 4;
  std::vector<BigRational> sum(cells, BigRational(0));
  std::vector<std::uint8_t> idx(cb.length());
  const std::size_t slots = cb.length() / 4;
  for (int chunk = 0; chunk < 10; ++chunk) {
    FourDSymbolBlock block;
    block.mapping_dim = 4;
    block.symbols.reserve(1000000);
    while (block.symbols.size() < 1000000) {
      shaper.encode(random_word<std::uint64_t>(cb.bits(), rng), idx);
      for (std::size_t t = 0; t < slots; ++t) {
        Symbol4 s;
        for (std::size_t q = 0; q < 4; ++q) s[q] = cb.alphabet()[idx[4 * t + q]] * ((rng() & 1) ? -1 : 1);
        block.symbols.push_back(s);
      }
    }
    const auto e = empirical_pmf(std::span<const FourDSymbolBlock>(&block, 1), dim, cb.alphabet());
    for (std::size_t c = 0; c < cells; ++c) sum[c] += e[c] / 10;
  }
  return PmfTable(cb.alphabet(), dim, sum);
}

// Exact law of D-tuples over the words the encoder really emits: the first
// n_seq lexicographic permutations of each selected shell.
std::vector<double> lexicographic_ensemble(std::size_t L, std::size_t k, std::size_t D) {
  const std::vector<int> levels{1, 3, 5, 7};
  std::size_t cells = 1;
  for (std::size_t i = 0; i < D; ++i) cells *= 4;
  std::vector<double> out(cells, 0.0);
  const auto shells = oracle::shells(levels, L);
  for (const auto& sel : oracle::dyadic_greedy(levels, L, k)) {
    for (const auto& sh : shells) {
      if (sh.counts != sel.counts) continue;
      for (std::uint64_t r = 0; r < sel.n_seq; ++r) {
        for (std::size_t b = 0; b + D <= L; b += D) {
          std::size_t cell = 0;
          for (std::size_t j = 0; j < D; ++j) {
            cell = cell * 4 + static_cast<std::size_t>(std::find(levels.begin(), levels.end(), sh.sequences[r][b + j]) -
                                                       levels.begin());
          }
          out[cell] += 1.0 / static_cast<double>((std::uint64_t{1} << k) * (L / D));
        }
      }
    }
  }
  return out;
}

}  // namespace

TEST(EmpiricalPmf, OneDimensionalLawIsExactForEncoderOutput) {
  const auto cb = build_codebook(AmplitudeAlphabet{}, 16, 28);
  EXPECT_LT(total_variation(empirical_hcss(cb, 1, 17), pmf_1d(cb)), 5e-3);
  const auto cb8 = build_codebook(AmplitudeAlphabet{}, 8, 14);
  const auto ens = lexicographic_ensemble(8, 14, 1);
  const auto p = pmf_1d(cb8).to_double();
  for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(ens[c], p[c], 1e-12);
}

TEST(EmpiricalPmf, FourDimensionalLawMatchesLexicographicEnsemble) {
  const auto cb = build_codebook(AmplitudeAlphabet{}, 8, 14);
  const auto emp = empirical_hcss(cb, 4, 23).to_double();
  const auto ens = lexicographic_ensemble(8, 14, 4);
  double tv = 0;
  for (std::size_t c = 0; c < ens.size(); ++c) tv += 0.5 * std::abs(emp[c] - ens[c]);
  EXPECT_LT(tv, 5e-3);
}

// The analytic multi-dimensional law assumes every permutation of a shell is
// equally likely; the encoder uses only the first n_seq in lexicographic
// order, so the real 2D/4D laws differ by a gap that shrinks with L.
TEST(EmpiricalPmf, AnalyticHigherDimensionalLawIsAnApproximation) {
  double prev = 1.0;
  for (auto [L, k] : {std::pair{16, 28}, {32, 56}}) {
    const auto cb = build_codebook(AmplitudeAlphabet{}, L, k);
    const double tv = total_variation(empirical_hcss(cb, 4, 29), pmf_4d(cb));
    EXPECT_GT(tv, 5e-3) << "L=" << L;
    EXPECT_LT(tv, prev) << "L=" << L;
    EXPECT_LT(tv, 0.1);
    prev = tv;
  }
}

TEST(EmpiricalPmf, PointMassAndUniform) {
  FourDSymbolBlock one;
  one.symbols = {Symbol4{3, -3, 5, 1}};
  one.mapping_dim = 4;
  const auto p = empirical_pmf(std::span<const FourDSymbolBlock>(&one, 1), 4, AmplitudeAlphabet{});
  EXPECT_EQ(p.at(std::array<std::size_t, 4>{1, 1, 2, 0}), BigRational(1));
  const auto p1 = empirical_pmf(std::span<const FourDSymbolBlock>(&one, 1), 1, AmplitudeAlphabet{});
  EXPECT_EQ(p1[1], BigRational(1, 2));

  FourDSymbolBlock flat;
  std::mt19937_64 rng(2);
  for (int i = 0; i < 400000; ++i) {
    Symbol4 s;
    for (auto& v : s) v = 2 * static_cast<int>(rng() % 4) + 1;
    flat.symbols.push_back(s);
  }
  const auto u = empirical_pmf(std::span<const FourDSymbolBlock>(&flat, 1), 2, AmplitudeAlphabet{});
  const PmfTable ref(AmplitudeAlphabet{}, 2, std::vector<BigRational>(16, BigRational(1, 16)));
  EXPECT_LT(total_variation(u, ref), 5e-3);
  EXPECT_THROW(empirical_pmf(std::span<const FourDSymbolBlock>(), 4, AmplitudeAlphabet{}), Error);
}
