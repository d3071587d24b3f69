#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hcss/alphabet.hpp"
#include "hcss/bigint.hpp"
#include "hcss/error.hpp"

namespace hcss {

// Bits are stored one per byte (0 or 1), most significant first.
using BitString = std::vector<std::uint8_t>;

inline std::string bits_to_string(const BitString& bits) {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s += b ? '1' : '0';
  return s;
}

inline BitString bits_from_string(const std::string& s) {
  BitString bits;
  bits.reserve(s.size());
  for (char ch : s) {
    if (ch != '0' && ch != '1') throw Error(ErrorCode::ParseError, "bit string holds '" + std::string(1, ch) + "'");
    bits.push_back(ch == '1');
  }
  return bits;
}

// MSB-first bits <-> unsigned integer.
inline BigCount bits_to_integer(const BitString& bits, std::size_t begin, std::size_t count) {
  BigCount v = 0;
  for (std::size_t i = 0; i < count; ++i) {
    v <<= 1;
    if (bits[begin + i]) v |= 1;
  }
  return v;
}

inline BitString integer_to_bits(const BigCount& v, std::size_t width) {
  BitString bits(width, 0);
  for (std::size_t i = 0; i < width; ++i) bits[width - 1 - i] = boost::multiprecision::bit_test(v, i) ? 1 : 0;
  return bits;
}

struct CodebookEntry {
  Composition composition;
  long energy = 0;
  BigCount n_seq;
  std::size_t payload_bits = 0;
  BitString prefix;

  // n_seq / 2^k, with k = prefix.size() + payload_bits.
  BigRational probability() const {
    return BigRational(n_seq, pow2(prefix.size() + payload_bits));
  }
};

struct ParsedWord {
  std::size_t entry = 0;
  BigCount payload;
};

// Dyadic composition set with its canonical prefix code. Immutable once built.
//
// Canonical codewords are assigned in (prefix length asc, entry index asc)
// order. In that order each codeword, left-aligned to k bits, equals the sum
// of n_seq over all earlier entries, so the code is stored as a table of
// cumulative interval starts and a k-bit word parses by binary search.
class ShaperCodebook {
 public:
  ShaperCodebook(AmplitudeAlphabet alphabet, std::size_t length, std::size_t bits,
                 std::vector<CodebookEntry> entries)
      : alphabet_(std::move(alphabet)), length_(length), bits_(bits), entries_(std::move(entries)) {
    index_code();
  }

  const AmplitudeAlphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t length() const noexcept { return length_; }
  std::size_t bits() const noexcept { return bits_; }
  BigRational shaping_rate() const { return BigRational(bits_, length_); }
  double shaping_rate_value() const { return static_cast<double>(bits_) / static_cast<double>(length_); }

  const std::vector<CodebookEntry>& entries() const noexcept { return entries_; }
  const CodebookEntry& entry(std::size_t i) const { return entries_.at(i); }
  std::size_t size() const noexcept { return entries_.size(); }

  // Entry indices in canonical code order, and each one's first k-bit word.
  const std::vector<std::size_t>& canonical_order() const noexcept { return canonical_; }
  const BigCount& word_start(std::size_t entry_index) const { return starts_by_entry_.at(entry_index); }

  // Index of the entry with this composition, or size() when absent.
  std::size_t find(const Composition& c) const {
    auto it = by_composition_.find(c);
    return it == by_composition_.end() ? entries_.size() : it->second;
  }

  BigRational kraft_sum() const {
    BigRational s = 0;
    for (const auto& e : entries_) s += BigRational(1, pow2(e.prefix.size()));
    return s;
  }

  BigCount total_sequences() const {
    BigCount s = 0;
    for (const auto& e : entries_) s += e.n_seq;
    return s;
  }

  // Per-amplitude average energy sum_i p_i E_i / L, exact.
  BigRational average_energy() const {
    BigCount num = 0;
    for (const auto& e : entries_) num += e.n_seq * e.energy;
    return BigRational(num, pow2(bits_) * length_);
  }

  long max_energy() const { return entries_.empty() ? 0 : entries_.back().energy; }

  // Splits a k-bit word (as integer) into (entry, payload rank).
  ParsedWord parse(const BigCount& word) const {
    if (word < 0 || word >= pow2(bits_)) throw Error(ErrorCode::InvalidArgument, "word exceeds k bits");
    auto it = std::upper_bound(canonical_starts_.begin(), canonical_starts_.end(), word);
    const auto pos = static_cast<std::size_t>(it - canonical_starts_.begin()) - 1;
    const std::size_t idx = canonical_[pos];
    return {idx, word - canonical_starts_[pos]};
  }

  BigCount word_for(std::size_t entry_index, const BigCount& payload) const {
    return starts_by_entry_.at(entry_index) + payload;
  }

 private:
  void index_code() {
    if (length_ == 0 || bits_ == 0) throw Error(ErrorCode::InvalidArgument, "L and k must be positive");
    if (entries_.empty()) throw Error(ErrorCode::InvalidArgument, "codebook has no entries");
    canonical_.resize(entries_.size());
    const FactorialTable fact(length_);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      auto& e = entries_[i];
      if (e.composition.counts.size() != alphabet_.size() || e.composition.length() != length_) {
        throw Error(ErrorCode::InvalidArgument, "entry " + e.composition.to_string() + " has wrong shape");
      }
      if (e.payload_bits > bits_) throw Error(ErrorCode::InvalidArgument, "payload exceeds k bits");
      e.energy = e.composition.energy(alphabet_);
      e.n_seq = pow2(e.payload_bits);
      if (e.n_seq > multinomial(e.composition, fact)) {
        throw Error(ErrorCode::InvalidArgument, "entry " + e.composition.to_string() + " exceeds its permutations");
      }
      if (i > 0 && e.energy < entries_[i - 1].energy) {
        throw Error(ErrorCode::InvalidArgument, "entries must be energy non-decreasing");
      }
      if (!by_composition_.emplace(e.composition, i).second) {
        throw Error(ErrorCode::InvalidArgument, "duplicate composition " + e.composition.to_string());
      }
      canonical_[i] = i;
    }
    if (total_sequences() != pow2(bits_)) {
      throw Error(ErrorCode::InvalidArgument, "entry sequence counts do not sum to 2^k");
    }
    // Shorter prefixes (larger payloads) first; ties keep entry order.
    std::stable_sort(canonical_.begin(), canonical_.end(), [&](std::size_t x, std::size_t y) {
      return entries_[x].payload_bits > entries_[y].payload_bits;
    });
    canonical_starts_.resize(entries_.size());
    starts_by_entry_.resize(entries_.size());
    BigCount acc = 0;
    for (std::size_t pos = 0; pos < canonical_.size(); ++pos) {
      auto& e = entries_[canonical_[pos]];
      canonical_starts_[pos] = acc;
      starts_by_entry_[canonical_[pos]] = acc;
      const std::size_t prefix_len = bits_ - e.payload_bits;
      e.prefix = integer_to_bits(acc >> e.payload_bits, prefix_len);
      acc += e.n_seq;
    }
  }

  AmplitudeAlphabet alphabet_;
  std::size_t length_;
  std::size_t bits_;
  std::vector<CodebookEntry> entries_;
  std::map<Composition, std::size_t> by_composition_;
  std::vector<std::size_t> canonical_;
  std::vector<BigCount> canonical_starts_;
  std::vector<BigCount> starts_by_entry_;
};

// Dyadic greedy fill: walk shells in energy order, give each the largest power
// of two that is <= both its permutation count and the remaining budget.
inline ShaperCodebook build_codebook(const AmplitudeAlphabet& alphabet, std::size_t length, std::size_t bits) {
  if (length == 0 || bits == 0) throw Error(ErrorCode::InvalidArgument, "L and k must be positive");
  BigCount all = 1;
  for (std::size_t i = 0; i < length; ++i) all *= alphabet.size();
  if (pow2(bits) > all) {
    throw Error(ErrorCode::RateInfeasible, "2^" + std::to_string(bits) + " exceeds |A|^L for L=" +
                                               std::to_string(length));
  }

  const FactorialTable fact(length);
  BigCount remaining = pow2(bits);
  std::vector<CodebookEntry> entries;
  for (auto& c : enumerate_compositions(alphabet, length)) {
    if (remaining == 0) break;
    const BigCount take = std::min(sequences_for(c, fact), pow2_floor(remaining));
    CodebookEntry e;
    e.payload_bits = floor_log2(take);
    e.composition = std::move(c);
    entries.push_back(std::move(e));
    remaining -= take;
  }
  if (remaining != 0) {
    throw Error(ErrorCode::RateInfeasible, "dyadic fill of 2^" + std::to_string(bits) +
                                               " words exhausts all shells for L=" + std::to_string(length));
  }
  return ShaperCodebook(alphabet, length, bits, std::move(entries));
}

struct PrefixParse {
  std::size_t entry_index = 0;
  const CodebookEntry* entry = nullptr;
  BitString payload;
};

// Consumes exactly k bits starting at `offset`.
inline PrefixParse parse_prefix(const ShaperCodebook& cb, const BitString& bits, std::size_t offset = 0) {
  if (bits.size() < offset + cb.bits()) throw Error(ErrorCode::InvalidArgument, "fewer than k bits available");
  const auto parsed = cb.parse(bits_to_integer(bits, offset, cb.bits()));
  const auto& e = cb.entry(parsed.entry);
  return {parsed.entry, &e,
          BitString(bits.begin() + static_cast<std::ptrdiff_t>(offset + e.prefix.size()),
                    bits.begin() + static_cast<std::ptrdiff_t>(offset + cb.bits()))};
}

// Text format, one entry per line:
//
//   hcss-codebook 1
//   alphabet 1 3 5 7
//   length <L>
//   bits <k>
//   entries <N>
//   <c_1> ... <c_n> <payload_bits> <prefix|->
inline void write_codebook(std::ostream& os, const ShaperCodebook& cb) {
  os << "hcss-codebook 1\nalphabet";
  for (int a : cb.alphabet().levels()) os << ' ' << a;
  os << "\nlength " << cb.length() << "\nbits " << cb.bits() << "\nentries " << cb.size() << '\n';
  for (const auto& e : cb.entries()) {
    for (auto c : e.composition.counts) os << c << ' ';
    os << e.payload_bits << ' ' << (e.prefix.empty() ? std::string("-") : bits_to_string(e.prefix)) << '\n';
  }
}

inline std::string codebook_to_string(const ShaperCodebook& cb) {
  std::ostringstream os;
  write_codebook(os, cb);
  return os.str();
}

inline ShaperCodebook read_codebook(std::istream& is) {
  auto expect = [&](const std::string& key) {
    std::string tok;
    if (!(is >> tok) || tok != key) throw Error(ErrorCode::ParseError, "codebook: expected '" + key + "'");
  };
  expect("hcss-codebook");
  int version = 0;
  if (!(is >> version) || version != 1) throw Error(ErrorCode::ParseError, "codebook: unsupported version");
  expect("alphabet");
  std::string line;
  std::getline(is, line);
  std::istringstream ls(line);
  std::vector<int> levels;
  for (int a; ls >> a;) levels.push_back(a);
  AmplitudeAlphabet alphabet(levels);
  std::size_t length = 0, bits = 0, n = 0;
  expect("length");
  is >> length;
  expect("bits");
  is >> bits;
  expect("entries");
  is >> n;
  if (!is) throw Error(ErrorCode::ParseError, "codebook: bad header");
  std::vector<CodebookEntry> entries(n);
  std::vector<std::string> prefixes(n);
  for (std::size_t i = 0; i < n; ++i) {
    entries[i].composition.counts.resize(alphabet.size());
    for (auto& c : entries[i].composition.counts) is >> c;
    is >> entries[i].payload_bits >> prefixes[i];
    if (!is) throw Error(ErrorCode::ParseError, "codebook: truncated entry " + std::to_string(i));
  }
  ShaperCodebook cb(std::move(alphabet), length, bits, std::move(entries));
  for (std::size_t i = 0; i < n; ++i) {
    const std::string stored = prefixes[i] == "-" ? std::string() : prefixes[i];
    if (stored != bits_to_string(cb.entry(i).prefix)) {
      throw Error(ErrorCode::ParseError, "codebook: prefix of entry " + std::to_string(i) + " is not canonical");
    }
  }
  return cb;
}

}  // namespace hcss
