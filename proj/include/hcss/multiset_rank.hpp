#pragma once

#include <algorithm>
#include <array>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <unordered_map>
#include <vector>

#include "hcss/alphabet.hpp"
#include "hcss/bigint.hpp"
#include "hcss/codebook.hpp"
#include "hcss/error.hpp"

namespace hcss {

inline constexpr std::size_t kMaxLutLevels = 8;
inline constexpr std::size_t kMaxLutLength = 255;

using Residual = std::array<std::uint32_t, kMaxLutLevels>;

struct AmplitudeSequence {
  std::vector<int> amplitudes;
  std::optional<std::size_t> source_entry;
};

namespace detail {

template <class T>
concept HasWordTraits = requires(const BigCount& b) { WordTraits<T>::from_big(b); };

template <class Value>
Value value_from_big(const BigCount& v) {
  if constexpr (HasWordTraits<Value>) {
    return WordTraits<Value>::from_big(v);
  } else {
    return Value(v);
  }
}

}  // namespace detail

// Multinomial coefficients of every residual composition met while ranking
// any codebook sequence. A multinomial depends only on the multiset of its
// counts, so the table is keyed by the counts sorted in descending order and
// packed 8 bits apiece.
template <class Value>
class BasicRankLut {
 public:
  using value_type = Value;

  BasicRankLut(AmplitudeAlphabet alphabet, std::unordered_map<std::uint64_t, Value> table, std::size_t value_bits)
      : alphabet_(std::move(alphabet)), table_(std::move(table)), value_bits_(value_bits) {}

  const AmplitudeAlphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t levels() const noexcept { return alphabet_.size(); }
  std::size_t entry_count() const noexcept { return table_.size(); }
  std::size_t value_bits() const noexcept { return value_bits_; }
  std::size_t storage_bits() const noexcept { return table_.size() * value_bits_; }

  // Sorting network on a copy: compare/swap and shifts only.
  static std::uint64_t key_of(const Residual& counts, std::size_t levels) {
    Residual s = counts;
    for (std::size_t i = 1; i < levels; ++i) {
      for (std::size_t j = i; j > 0 && s[j - 1] < s[j]; --j) std::swap(s[j - 1], s[j]);
    }
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < levels; ++i) key |= static_cast<std::uint64_t>(s[i]) << (8 * i);
    return key;
  }

  const Value& value(const Residual& counts) const {
    auto it = table_.find(key_of(counts, levels()));
    if (it == table_.end()) throw Error(ErrorCode::UnknownComposition, "residual not covered by rank table");
    return it->second;
  }

  const std::unordered_map<std::uint64_t, Value>& table() const noexcept { return table_; }

 private:
  AmplitudeAlphabet alphabet_;
  std::unordered_map<std::uint64_t, Value> table_;
  std::size_t value_bits_;
};

using RankLut = BasicRankLut<BigCount>;

template <class Value = BigCount>
BasicRankLut<Value> build_lut(const ShaperCodebook& cb) {
  const std::size_t n = cb.alphabet().size();
  if (n > kMaxLutLevels) throw Error(ErrorCode::InvalidArgument, "rank table supports at most 8 levels");
  if (cb.length() > kMaxLutLength) throw Error(ErrorCode::InvalidArgument, "rank table supports L <= 255");

  // Distinct descending shapes of the codebook compositions.
  std::set<std::vector<std::uint32_t>> shapes;
  for (const auto& e : cb.entries()) {
    auto s = e.composition.counts;
    std::sort(s.begin(), s.end(), std::greater<>());
    shapes.insert(std::move(s));
  }

  // A descending residual fits under a composition iff it is componentwise
  // <= the composition's descending shape.
  std::set<std::uint64_t> keys;
  Residual cur{};
  for (const auto& shape : shapes) {
    auto recurse = [&](auto&& self, std::size_t level, std::uint32_t cap, std::size_t sum) -> void {
      if (level == n) {
        if (sum < cb.length()) keys.insert(BasicRankLut<Value>::key_of(cur, n));
        return;
      }
      const std::uint32_t hi = std::min(cap, shape[level]);
      for (std::uint32_t v = 0; v <= hi; ++v) {
        cur[level] = v;
        self(self, level + 1, v, sum + v);
      }
      cur[level] = 0;
    };
    recurse(recurse, 0, static_cast<std::uint32_t>(cb.length()), 0);
  }

  const FactorialTable fact(cb.length());
  std::unordered_map<std::uint64_t, Value> table;
  table.reserve(keys.size());
  BigCount max_value = 0;
  for (auto key : keys) {
    Composition c{std::vector<std::uint32_t>(n)};
    for (std::size_t i = 0; i < n; ++i) c.counts[i] = static_cast<std::uint32_t>((key >> (8 * i)) & 0xff);
    BigCount m = multinomial(c, fact);
    if (m > max_value) max_value = m;
    table.emplace(key, detail::value_from_big<Value>(m));
  }
  const std::size_t width = bit_width(max_value);
  if constexpr (detail::HasWordTraits<Value>) {
    if (width > WordTraits<Value>::bits) {
      throw Error(ErrorCode::InvalidArgument, "rank table values need " + std::to_string(width) + " bits");
    }
  }
  return BasicRankLut<Value>(cb.alphabet(), std::move(table), width);
}

// Writes one line per table entry: descending residual counts, then value.
template <class Value>
void dump_lut(std::ostream& os, const BasicRankLut<Value>& lut) {
  std::vector<std::uint64_t> keys;
  for (const auto& [k, v] : lut.table()) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  for (auto k : keys) {
    for (std::size_t i = 0; i < lut.levels(); ++i) os << ((k >> (8 * i)) & 0xff) << ' ';
    os << "-> " << lut.table().at(k) << '\n';
  }
}

// Writes the sequence at lexicographic position `rank` among the permutations
// of `composition` into `out` as alphabet indices. Reads the table, compares
// and subtracts; nothing else touches the count values.
template <class Lut>
void unrank_indices(std::span<const std::uint32_t> composition, typename Lut::value_type rank, const Lut& lut,
                    std::span<std::uint8_t> out) {
  const std::size_t n = composition.size();
  Residual residual{};
  std::copy(composition.begin(), composition.end(), residual.begin());
  for (std::size_t pos = 0; pos < out.size(); ++pos) {
    std::size_t last = n;
    for (std::size_t a = 0; a < n; ++a) {
      if (residual[a] == 0) continue;
      last = a;
      --residual[a];
      const auto& block = lut.value(residual);
      if (rank < block) break;
      rank -= block;
      ++residual[a];
      last = n;
    }
    if (last == n) throw Error(ErrorCode::RankOutOfRange, "rank exceeds permutation count");
    out[pos] = static_cast<std::uint8_t>(last);
  }
}

// Inverse of unrank_indices: sums the blocks skipped at each position.
template <class Lut>
typename Lut::value_type rank_indices(std::span<const std::uint8_t> seq, std::size_t levels, const Lut& lut) {
  Residual residual{};
  for (auto a : seq) {
    if (a >= levels) throw Error(ErrorCode::InvalidArgument, "sequence index outside alphabet");
    ++residual[a];
  }
  typename Lut::value_type rank{};
  for (auto a : seq) {
    for (std::size_t b = 0; b < a; ++b) {
      if (residual[b] == 0) continue;
      --residual[b];
      rank += lut.value(residual);
      ++residual[b];
    }
    --residual[a];
  }
  return rank;
}

inline AmplitudeSequence unrank(const CodebookEntry& entry, const BigCount& rank, const RankLut& lut) {
  if (rank < 0 || rank >= entry.n_seq) {
    throw Error(ErrorCode::RankOutOfRange, "rank " + rank.str() + " outside [0, " + entry.n_seq.str() + ")");
  }
  std::vector<std::uint8_t> idx(entry.composition.length());
  unrank_indices(std::span<const std::uint32_t>(entry.composition.counts), rank, lut, idx);
  AmplitudeSequence seq;
  seq.amplitudes.reserve(idx.size());
  for (auto i : idx) seq.amplitudes.push_back(lut.alphabet()[i]);
  return seq;
}

inline AmplitudeSequence unrank(const ShaperCodebook& cb, std::size_t entry_index, const BigCount& rank,
                                const RankLut& lut) {
  auto seq = unrank(cb.entry(entry_index), rank, lut);
  seq.source_entry = entry_index;
  return seq;
}

inline std::vector<std::uint8_t> to_indices(const AmplitudeAlphabet& alphabet, const std::vector<int>& amplitudes) {
  std::vector<std::uint8_t> idx(amplitudes.size());
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    const auto k = alphabet.index_of(amplitudes[i]);
    if (k == alphabet.size()) {
      throw Error(ErrorCode::UnknownComposition, "amplitude " + std::to_string(amplitudes[i]) + " not in alphabet");
    }
    idx[i] = static_cast<std::uint8_t>(k);
  }
  return idx;
}

// Rank within the codebook entry the sequence realizes.
inline BigCount rank(const ShaperCodebook& cb, const AmplitudeSequence& seq, const RankLut& lut) {
  if (seq.amplitudes.size() != cb.length()) throw Error(ErrorCode::UnknownComposition, "sequence length is not L");
  const auto c = composition_of(cb.alphabet(), seq.amplitudes);
  if (cb.find(c) == cb.size()) {
    throw Error(ErrorCode::UnknownComposition, "composition " + c.to_string() + " is not a codebook entry");
  }
  return rank_indices(std::span<const std::uint8_t>(to_indices(cb.alphabet(), seq.amplitudes)),
                      cb.alphabet().size(), lut);
}

}  // namespace hcss
