#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <cstdint>
#include <ostream>
#include <random>
#include <span>
#include <vector>

#include "hcss/codebook.hpp"
#include "hcss/codecs.hpp"
#include "hcss/error.hpp"
#include "hcss/maxwell_boltzmann.hpp"
#include "hcss/multiset_rank.hpp"
#include "hcss/symbol_mapping.hpp"

namespace hcss {

// Stand-in for systematic FEC parity: uniform sign bits from a seeded stream.
class UniformSignSource {
 public:
  explicit UniformSignSource(std::uint64_t seed) : rng_(make_rng(seed, 0x5167)) {}

  std::uint8_t operator()() {
    if (left_ == 0) {
      cache_ = rng_();
      left_ = 64;
    }
    const auto bit = static_cast<std::uint8_t>(cache_ & 1u);
    cache_ >>= 1;
    --left_;
    return bit;
  }

 private:
  std::mt19937_64 rng_;
  std::uint64_t cache_ = 0;
  int left_ = 0;
};

// One frame carries lanes * k info bits: word j of the frame feeds lane j.
template <class SignSource>
std::vector<FourDSymbolBlock> pas_assemble(const BitString& info_bits, const ShaperCodebook& cb, const RankLut& lut,
                                           int dim, SignSource&& sign_source) {
  const std::size_t lanes = lanes_for(dim);
  const std::size_t frame_bits = lanes * cb.bits();
  if (info_bits.size() % frame_bits != 0) {
    throw Error(ErrorCode::FramingError, std::to_string(info_bits.size()) + " info bits is not a multiple of " +
                                             std::to_string(frame_bits));
  }
  if (cb.length() % static_cast<std::size_t>(dim) != 0) {
    throw Error(ErrorCode::FramingError, "L is not divisible by the mapping dimension");
  }
  std::vector<FourDSymbolBlock> out;
  out.reserve(info_bits.size() / frame_bits);
  std::vector<AmplitudeSequence> seqs(lanes);
  BitString word(cb.bits());
  for (std::size_t f = 0; f < info_bits.size(); f += frame_bits) {
    for (std::size_t l = 0; l < lanes; ++l) {
      std::copy_n(info_bits.begin() + static_cast<std::ptrdiff_t>(f + l * cb.bits()), cb.bits(), word.begin());
      seqs[l] = hcss_encode(cb, lut, word);
    }
    const std::size_t slots = cb.length() / static_cast<std::size_t>(dim);
    BitString signs(4 * slots);
    for (auto& s : signs) s = sign_source();
    out.push_back(map_symbols(std::span<const AmplitudeSequence>(seqs), signs, dim));
  }
  return out;
}

// Drops signs, regroups amplitudes by lane and inverts the shaper per word.
inline BitString pas_disassemble(std::span<const FourDSymbolBlock> blocks, const ShaperCodebook& cb,
                                 const RankLut& lut, int dim) {
  const std::size_t lanes = lanes_for(dim);
  const std::size_t slots = cb.length() / static_cast<std::size_t>(dim);
  BitString out;
  out.reserve(blocks.size() * lanes * cb.bits());
  std::vector<AmplitudeSequence> seqs(lanes);
  for (std::size_t f = 0; f < blocks.size(); ++f) {
    const auto& b = blocks[f];
    if (b.mapping_dim != dim || b.symbols.size() != slots) {
      throw Error(ErrorCode::FrameCorrupt, "frame " + std::to_string(f) + " has the wrong shape");
    }
    for (auto& s : seqs) s.amplitudes.assign(cb.length(), 0);
    for (std::size_t t = 0; t < slots; ++t) {
      for (std::size_t q = 0; q < 4; ++q) {
        seqs[lane_of(dim, q)].amplitudes[lane_position(dim, t, q)] = std::abs(b.symbols[t][q]);
      }
    }
    for (const auto& s : seqs) {
      try {
        const auto word = hcss_decode(cb, lut, s);
        out.insert(out.end(), word.begin(), word.end());
      } catch (const Error& e) {
        if (e.code() == ErrorCode::UnknownComposition || e.code() == ErrorCode::RankOutOfRange) {
          throw Error(ErrorCode::FrameCorrupt, "frame " + std::to_string(f) + ": " + e.what());
        }
        throw;
      }
    }
  }
  return out;
}

// Frame dump: symbol export columns plus the source lane of each quadrature.
inline void write_frames_csv(std::ostream& os, std::span<const FourDSymbolBlock> blocks) {
  os << "frame,slot,XI,XQ,YI,YQ,lane_XI,lane_XQ,lane_YI,lane_YQ\n";
  std::size_t slot = 0;
  for (std::size_t f = 0; f < blocks.size(); ++f) {
    const int dim = blocks[f].mapping_dim;
    for (const auto& s : blocks[f].symbols) {
      os << f << ',' << slot++ << ',' << s[0] << ',' << s[1] << ',' << s[2] << ',' << s[3];
      for (std::size_t q = 0; q < 4; ++q) os << ',' << lane_of(dim, q);
      os << '\n';
    }
  }
}

}  // namespace hcss
