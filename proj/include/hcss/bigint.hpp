#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>

namespace hcss {

using BigCount = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;
using uint128_t = unsigned __int128;

inline BigCount pow2(std::size_t exponent) {
  BigCount v = 1;
  v <<= exponent;
  return v;
}

// floor(log2(v)) for v >= 1.
inline std::size_t floor_log2(const BigCount& v) { return boost::multiprecision::msb(v); }

inline std::size_t bit_width(const BigCount& v) { return v == 0 ? 0 : floor_log2(v) + 1; }

// Largest power of two <= v, or 0 when v == 0.
inline BigCount pow2_floor(const BigCount& v) { return v == 0 ? BigCount(0) : pow2(floor_log2(v)); }

inline double to_double(const BigRational& q) { return q.convert_to<double>(); }
inline double to_double(const BigCount& v) { return v.convert_to<double>(); }

// Number of value bits of each word type usable on the codec fast paths.
template <class Word>
struct WordTraits;

template <>
struct WordTraits<std::uint64_t> {
  static constexpr std::size_t bits = 64;
  static std::uint64_t from_big(const BigCount& v) { return v.convert_to<std::uint64_t>(); }
  static BigCount to_big(std::uint64_t v) { return BigCount(v); }
};

template <>
struct WordTraits<uint128_t> {
  static constexpr std::size_t bits = 128;
  static uint128_t from_big(const BigCount& v) {
    const auto lo = static_cast<std::uint64_t>(v & std::numeric_limits<std::uint64_t>::max());
    const auto hi = static_cast<std::uint64_t>(v >> 64);
    return (static_cast<uint128_t>(hi) << 64) | lo;
  }
  static BigCount to_big(uint128_t v) {
    BigCount out = static_cast<std::uint64_t>(v >> 64);
    out <<= 64;
    out |= static_cast<std::uint64_t>(v);
    return out;
  }
};

template <>
struct WordTraits<BigCount> {
  static constexpr std::size_t bits = static_cast<std::size_t>(-1);
  static const BigCount& from_big(const BigCount& v) { return v; }
  static const BigCount& to_big(const BigCount& v) { return v; }
};

}  // namespace hcss
