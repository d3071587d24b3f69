#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "hcss/bigint.hpp"
#include "hcss/error.hpp"

namespace hcss {

// Positive odd amplitude levels in increasing order. The default is the
// PAM8 magnitude set {1,3,5,7} underlying DP-64QAM.
class AmplitudeAlphabet {
 public:
  AmplitudeAlphabet() : AmplitudeAlphabet({1, 3, 5, 7}) {}

  AmplitudeAlphabet(std::initializer_list<int> levels)
      : AmplitudeAlphabet(std::vector<int>(levels)) {}

  explicit AmplitudeAlphabet(std::vector<int> levels) : levels_(std::move(levels)) {
    if (levels_.size() < 2) {
      throw Error(ErrorCode::InvalidArgument, "alphabet needs at least two levels");
    }
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      const int a = levels_[i];
      if (a <= 0 || a % 2 == 0) {
        throw Error(ErrorCode::InvalidArgument,
                    "alphabet level " + std::to_string(a) + " is not a positive odd integer");
      }
      if (i > 0 && a <= levels_[i - 1]) {
        throw Error(ErrorCode::InvalidArgument, "alphabet levels must be strictly increasing");
      }
    }
  }

  std::size_t size() const noexcept { return levels_.size(); }
  int operator[](std::size_t i) const { return levels_[i]; }
  const std::vector<int>& levels() const noexcept { return levels_; }

  // Index of `level`, or size() when absent.
  std::size_t index_of(int level) const noexcept {
    auto it = std::lower_bound(levels_.begin(), levels_.end(), level);
    if (it == levels_.end() || *it != level) return levels_.size();
    return static_cast<std::size_t>(it - levels_.begin());
  }

  long energy_of(std::size_t i) const { return static_cast<long>(levels_[i]) * levels_[i]; }

  friend bool operator==(const AmplitudeAlphabet&, const AmplitudeAlphabet&) = default;

 private:
  std::vector<int> levels_;
};

// Occurrence counts of each alphabet level within one amplitude sequence.
struct Composition {
  std::vector<std::uint32_t> counts;

  Composition() = default;
  Composition(std::initializer_list<std::uint32_t> c) : counts(c) {}
  explicit Composition(std::vector<std::uint32_t> c) : counts(std::move(c)) {}

  std::size_t length() const noexcept {
    return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  }

  long energy(const AmplitudeAlphabet& alphabet) const {
    long e = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) e += alphabet.energy_of(i) * counts[i];
    return e;
  }

  std::string to_string() const {
    std::string s = "{";
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(counts[i]);
    }
    return s + "}";
  }

  friend auto operator<=>(const Composition&, const Composition&) = default;
};

// Sequence energy: sum of squared amplitudes.
inline long sequence_energy(const std::vector<int>& amplitudes) {
  long e = 0;
  for (int a : amplitudes) e += static_cast<long>(a) * a;
  return e;
}

inline Composition composition_of(const AmplitudeAlphabet& alphabet, const std::vector<int>& amplitudes) {
  Composition c(std::vector<std::uint32_t>(alphabet.size(), 0));
  for (int a : amplitudes) {
    const std::size_t i = alphabet.index_of(a);
    if (i == alphabet.size()) {
      throw Error(ErrorCode::InvalidArgument, "amplitude " + std::to_string(a) + " not in alphabet");
    }
    ++c.counts[i];
  }
  return c;
}

// Exact factorials 0!..n!, computed once.
class FactorialTable {
 public:
  explicit FactorialTable(std::size_t n) : values_(n + 1) {
    values_[0] = 1;
    for (std::size_t i = 1; i <= n; ++i) values_[i] = values_[i - 1] * i;
  }

  std::size_t max_n() const noexcept { return values_.size() - 1; }
  const BigCount& operator()(std::size_t i) const { return values_.at(i); }

 private:
  std::vector<BigCount> values_;
};

// L! / prod c_k!, exact.
inline BigCount multinomial(const Composition& c, const FactorialTable& fact) {
  BigCount v = fact(c.length());
  for (auto n : c.counts) v /= fact(n);
  return v;
}

inline BigCount multinomial(const Composition& c) { return multinomial(c, FactorialTable(c.length())); }

// 2^floor(log2 multinomial(C)): the power-of-two share of a shell's permutations
// addressable by payload bits.
inline BigCount sequences_for(const Composition& c, const FactorialTable& fact) {
  return pow2_floor(multinomial(c, fact));
}

inline BigCount sequences_for(const Composition& c) { return pow2_floor(multinomial(c)); }

// Every composition of `length` over the alphabet, sorted by energy then counts.
inline std::vector<Composition> enumerate_compositions(const AmplitudeAlphabet& alphabet, std::size_t length) {
  if (length == 0) throw Error(ErrorCode::InvalidArgument, "composition length must be positive");
  std::vector<Composition> out;
  std::vector<std::uint32_t> counts(alphabet.size(), 0);
  const std::size_t last = alphabet.size() - 1;

  auto recurse = [&](auto&& self, std::size_t level, std::size_t remaining) -> void {
    if (level == last) {
      counts[level] = static_cast<std::uint32_t>(remaining);
      out.emplace_back(counts);
      return;
    }
    for (std::size_t n = 0; n <= remaining; ++n) {
      counts[level] = static_cast<std::uint32_t>(n);
      self(self, level + 1, remaining - n);
    }
  };
  recurse(recurse, 0, length);

  std::vector<long> energies(out.size());
  std::vector<std::size_t> order(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    energies[i] = out[i].energy(alphabet);
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (energies[x] != energies[y]) return energies[x] < energies[y];
    return out[x] < out[y];
  });
  std::vector<Composition> sorted;
  sorted.reserve(out.size());
  for (auto i : order) sorted.push_back(std::move(out[i]));
  return sorted;
}

}  // namespace hcss
