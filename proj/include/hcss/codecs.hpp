#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <unordered_map>
#include <variant>
#include <vector>

#include "hcss/bigint.hpp"
#include "hcss/codebook.hpp"
#include "hcss/error.hpp"
#include "hcss/multiset_rank.hpp"

namespace hcss {

// HCSS mapper/demapper over k-bit words held in `Word`. BigCount is exact for
// any (L, k); the fixed-width instantiations produce identical words whenever
// k and the rank table fit in the word.
template <class Word>
class BasicShaper {
 public:
  using word_type = Word;

  explicit BasicShaper(const ShaperCodebook& cb)
      : length_(cb.length()), bits_(cb.bits()), levels_(cb.alphabet().size()), lut_(build_lut<Word>(cb)) {
    if constexpr (detail::HasWordTraits<Word> && !std::is_same_v<Word, BigCount>) {
      if (bits_ > WordTraits<Word>::bits) throw Error(ErrorCode::InvalidArgument, "k does not fit the word type");
    }
    const auto& order = cb.canonical_order();
    starts_.reserve(order.size());
    entry_of_.reserve(order.size());
    for (auto idx : order) {
      starts_.push_back(detail::value_from_big<Word>(cb.word_start(idx)));
      entry_of_.push_back(idx);
    }
    compositions_.resize(cb.size());
    n_seq_.resize(cb.size());
    for (std::size_t i = 0; i < cb.size(); ++i) {
      const auto& e = cb.entry(i);
      std::copy(e.composition.counts.begin(), e.composition.counts.end(), compositions_[i].begin());
      n_seq_[i] = detail::value_from_big<Word>(e.n_seq);
      entry_by_key_.emplace(pack(compositions_[i]), i);
    }
    start_by_entry_.resize(cb.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) start_by_entry_[order[pos]] = starts_[pos];
  }

  std::size_t length() const noexcept { return length_; }
  std::size_t bits() const noexcept { return bits_; }
  std::size_t levels() const noexcept { return levels_; }
  const BasicRankLut<Word>& lut() const noexcept { return lut_; }

  // Maps word (< 2^k) to L alphabet indices; returns the entry index.
  std::size_t encode(const Word& word, std::span<std::uint8_t> out) const {
    auto it = std::upper_bound(starts_.begin(), starts_.end(), word);
    const auto pos = static_cast<std::size_t>(it - starts_.begin()) - 1;
    const std::size_t entry = entry_of_[pos];
    Word payload = word;
    payload -= starts_[pos];
    unrank_indices(std::span<const std::uint32_t>(compositions_[entry].data(), levels_), payload, lut_,
                   out.first(length_));
    return entry;
  }

  Word decode(std::span<const std::uint8_t> seq) const {
    if (seq.size() != length_) throw Error(ErrorCode::UnknownComposition, "sequence length is not L");
    Residual counts{};
    for (auto a : seq) {
      if (a >= levels_) throw Error(ErrorCode::UnknownComposition, "index outside alphabet");
      ++counts[a];
    }
    auto it = entry_by_key_.find(pack(counts));
    if (it == entry_by_key_.end()) throw Error(ErrorCode::UnknownComposition, "composition outside shaping sphere");
    Word r = rank_indices(seq, levels_, lut_);
    if (!(r < n_seq_[it->second])) throw Error(ErrorCode::RankOutOfRange, "rank beyond the entry's payload");
    r += start_by_entry_[it->second];
    return r;
  }

 private:
  static std::uint64_t pack(const Residual& c) {
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < kMaxLutLevels; ++i) key |= static_cast<std::uint64_t>(c[i]) << (8 * i);
    return key;
  }

  std::size_t length_;
  std::size_t bits_;
  std::size_t levels_;
  BasicRankLut<Word> lut_;
  std::vector<Word> starts_;
  std::vector<std::size_t> entry_of_;
  std::vector<Word> start_by_entry_;
  std::vector<Residual> compositions_;
  std::vector<Word> n_seq_;
  std::unordered_map<std::uint64_t, std::size_t> entry_by_key_;
};

using AnyShaper = std::variant<BasicShaper<std::uint64_t>, BasicShaper<uint128_t>, BasicShaper<BigCount>>;

// Narrowest word type holding both k and the rank table.
inline AnyShaper make_shaper(const ShaperCodebook& cb) {
  const auto width = std::max(cb.bits(), build_lut<BigCount>(cb).value_bits());
  if (width <= 64) return BasicShaper<std::uint64_t>(cb);
  if (width <= 128) return BasicShaper<uint128_t>(cb);
  return BasicShaper<BigCount>(cb);
}

template <class Word>
Word word_from_bits(std::span<const std::uint8_t> bits) {
  Word w{};
  for (auto b : bits) {
    w <<= 1;
    if (b) w |= Word(1);
  }
  return w;
}

template <class Word>
void word_to_bits(Word w, std::span<std::uint8_t> out) {
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = static_cast<std::uint8_t>(static_cast<unsigned>(w & Word(1)));
    w >>= 1;
  }
}

// Uniform k-bit word from a 64-bit generator.
template <class Word, class Rng>
Word random_word(std::size_t k, Rng& rng) {
  Word w{};
  std::size_t have = 0;
  while (have < k) {
    const std::size_t take = std::min<std::size_t>(64, k - have);
    std::uint64_t chunk = rng();
    if (take < 64) chunk &= (std::uint64_t{1} << take) - 1;
    w <<= take;
    w |= Word(chunk);
    have += take;
  }
  return w;
}

inline AmplitudeSequence hcss_encode(const ShaperCodebook& cb, const RankLut& lut, const BitString& bits) {
  if (bits.size() != cb.bits()) throw Error(ErrorCode::InvalidArgument, "hcss_encode needs exactly k bits");
  const auto parsed = parse_prefix(cb, bits);
  const BigCount payload = bits_to_integer(parsed.payload, 0, parsed.payload.size());
  return unrank(cb, parsed.entry_index, payload, lut);
}

inline BitString hcss_decode(const ShaperCodebook& cb, const RankLut& lut, const AmplitudeSequence& seq) {
  const BigCount r = rank(cb, seq, lut);
  const std::size_t idx = cb.find(composition_of(cb.alphabet(), seq.amplitudes));
  const auto& e = cb.entry(idx);
  if (r >= e.n_seq) throw Error(ErrorCode::RankOutOfRange, "sequence rank beyond the entry's payload");
  BitString out = e.prefix;
  const auto payload = integer_to_bits(r, e.payload_bits);
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

// File framing: input bytes are read MSB first and consumed k bits per word;
// each word becomes L output bytes holding amplitude level values.
inline std::vector<std::uint8_t> encode_bytes(const ShaperCodebook& cb, const AnyShaper& shaper,
                                              std::span<const std::uint8_t> input) {
  const std::size_t total_bits = input.size() * 8;
  if (total_bits % cb.bits() != 0) {
    throw Error(ErrorCode::FramingError, std::to_string(total_bits) + " input bits is not a multiple of k=" +
                                             std::to_string(cb.bits()));
  }
  BitString bits(total_bits);
  for (std::size_t i = 0; i < total_bits; ++i) bits[i] = (input[i / 8] >> (7 - i % 8)) & 1;
  const std::size_t words = total_bits / cb.bits();
  std::vector<std::uint8_t> out(words * cb.length());
  std::visit(
      [&](const auto& s) {
        using Word = typename std::decay_t<decltype(s)>::word_type;
        for (std::size_t w = 0; w < words; ++w) {
          const auto word = word_from_bits<Word>(std::span<const std::uint8_t>(bits).subspan(w * cb.bits(), cb.bits()));
          auto dst = std::span<std::uint8_t>(out).subspan(w * cb.length(), cb.length());
          s.encode(word, dst);
          for (auto& a : dst) a = static_cast<std::uint8_t>(cb.alphabet()[a]);
        }
      },
      shaper);
  return out;
}

inline std::vector<std::uint8_t> decode_bytes(const ShaperCodebook& cb, const AnyShaper& shaper,
                                              std::span<const std::uint8_t> amplitudes) {
  if (amplitudes.size() % cb.length() != 0) {
    throw Error(ErrorCode::FramingError, "amplitude count is not a multiple of L");
  }
  const std::size_t words = amplitudes.size() / cb.length();
  if ((words * cb.bits()) % 8 != 0) throw Error(ErrorCode::FramingError, "decoded bits do not fill whole bytes");
  BitString bits(words * cb.bits());
  std::vector<std::uint8_t> idx(cb.length());
  std::visit(
      [&](const auto& s) {
        using Word = typename std::decay_t<decltype(s)>::word_type;
        for (std::size_t w = 0; w < words; ++w) {
          for (std::size_t i = 0; i < cb.length(); ++i) {
            const auto k = cb.alphabet().index_of(amplitudes[w * cb.length() + i]);
            if (k == cb.alphabet().size()) throw Error(ErrorCode::UnknownComposition, "byte is not an amplitude level");
            idx[i] = static_cast<std::uint8_t>(k);
          }
          word_to_bits<Word>(s.decode(idx), std::span<std::uint8_t>(bits).subspan(w * cb.bits(), cb.bits()));
        }
      },
      shaper);
  std::vector<std::uint8_t> out(bits.size() / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) out[i / 8] |= static_cast<std::uint8_t>(bits[i] << (7 - i % 8));
  return out;
}

}  // namespace hcss
