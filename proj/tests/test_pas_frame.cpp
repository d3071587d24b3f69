#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "hcss/pas_frame.hpp"

using namespace hcss;

namespace {

BitString random_bits(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  BitString b(n);
  for (auto& v : b) v = rng() & 1;
  return b;
}

struct ConstantSigns {
  std::uint8_t v;
  std::uint8_t operator()() const { return v; }
};

const ShaperCodebook& cb32() {
  static const auto cb = build_codebook(AmplitudeAlphabet{}, 32, 56);
  return cb;
}

const RankLut& lut32() {
  static const auto lut = build_lut<BigCount>(cb32());
  return lut;
}

}  // namespace

TEST(PasFrame, OneWordPerLaneGivesOneFrame) {
  for (int dim : {1, 2, 4}) {
    const std::size_t lanes = lanes_for(dim);
    const auto bits = random_bits(lanes * 56, 3);
    const auto frames = pas_assemble(bits, cb32(), lut32(), dim, UniformSignSource(1));
    ASSERT_EQ(frames.size(), 1u);
    EXPECT_EQ(frames[0].symbols.size(), 32u / dim);
    EXPECT_EQ(frames[0].mapping_dim, dim);
    // each lane's amplitudes are the encoder output for its word
    for (std::size_t l = 0; l < lanes; ++l) {
      const BitString w(bits.begin() + l * 56, bits.begin() + (l + 1) * 56);
      const auto seq = hcss_encode(cb32(), lut32(), w);
      for (std::size_t t = 0; t < frames[0].symbols.size(); ++t)
        for (std::size_t q = 0; q < 4; ++q) {
          if (lane_of(dim, q) != l) continue;
          EXPECT_EQ(std::abs(frames[0].symbols[t][q]), seq.amplitudes[lane_position(dim, t, q)]);
        }
    }
  }
}

TEST(PasFrame, RoundTripOverManyFrames) {
  for (int dim : {4, 2, 1}) {
    const std::size_t frames = 10000;
    const auto bits = random_bits(frames * lanes_for(dim) * 56, 10 + dim);
    const auto blocks = pas_assemble(bits, cb32(), lut32(), dim, UniformSignSource(7));
    ASSERT_EQ(blocks.size(), frames);
    EXPECT_EQ(pas_disassemble(blocks, cb32(), lut32(), dim), bits) << dim;
  }
}

TEST(PasFrame, RoundTripShortCode) {
  const auto cb = build_codebook(AmplitudeAlphabet{}, 8, 14);
  const auto lut = build_lut<BigCount>(cb);
  for (int dim : {1, 2, 4}) {
    const auto bits = random_bits(10000 * lanes_for(dim) * 14, 99);
    const auto blocks = pas_assemble(bits, cb, lut, dim, UniformSignSource(5));
    EXPECT_EQ(blocks.size(), 10000u);
    EXPECT_EQ(pas_disassemble(blocks, cb, lut, dim), bits);
  }
}

TEST(PasFrame, EmptyInput) {
  const auto blocks = pas_assemble(BitString{}, cb32(), lut32(), 4, UniformSignSource(1));
  EXPECT_TRUE(blocks.empty());
  EXPECT_TRUE(pas_disassemble(blocks, cb32(), lut32(), 4).empty());
}

TEST(PasFrame, FramingError) {
  try {
    pas_assemble(random_bits(57, 1), cb32(), lut32(), 4, UniformSignSource(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FramingError);
  }
  // 2D needs two words per frame
  EXPECT_THROW(pas_assemble(random_bits(56, 1), cb32(), lut32(), 2, UniformSignSource(1)), Error);
  const auto cb = build_codebook(AmplitudeAlphabet{}, 6, 10);
  const auto lut = build_lut<BigCount>(cb);
  try {
    pas_assemble(random_bits(10, 1), cb, lut, 4, UniformSignSource(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FramingError);
  }
}

TEST(PasFrame, CorruptFramesAreRejected) {
  const auto bits = random_bits(56 * 3, 4);
  auto blocks = pas_assemble(bits, cb32(), lut32(), 4, UniformSignSource(2));
  auto expect_corrupt = [&](const std::vector<FourDSymbolBlock>& b, int dim) {
    try {
      pas_disassemble(b, cb32(), lut32(), dim);
      ADD_FAILURE() << "accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::FrameCorrupt);
    }
  };
  // wrong dimension or slot count
  expect_corrupt(blocks, 2);
  auto short_frame = blocks;
  short_frame[1].symbols.pop_back();
  expect_corrupt(short_frame, 4);
  // composition outside the codebook: all amplitudes 7
  auto bad = blocks;
  for (auto& s : bad[2].symbols) s = {7, -7, 7, 7};
  expect_corrupt(bad, 4);
  // composition kept but the sequence ranks past n_seq: reversed order
  const auto seq = hcss_encode(cb32(), lut32(), BitString(56, 1));
  auto rev = blocks;
  for (std::size_t t = 0; t < 8; ++t)
    for (std::size_t q = 0; q < 4; ++q) rev[0].symbols[t][q] = seq.amplitudes[31 - (4 * t + q)];
  bool corrupt = false;
  try {
    const auto got = pas_disassemble(rev, cb32(), lut32(), 4);
    corrupt = false;
    (void)got;
  } catch (const Error& e) {
    corrupt = e.code() == ErrorCode::FrameCorrupt;
  }
  // the reversed sequence sorts last; it is only valid if its shell keeps every permutation
  const auto parsed = parse_prefix(cb32(), BitString(56, 1));
  const bool full_shell = parsed.entry->n_seq == multinomial(parsed.entry->composition);
  EXPECT_EQ(corrupt, !full_shell);
}

TEST(PasFrame, SignsNeverAffectRecoveredBits) {
  const auto bits = random_bits(56 * 200, 8);
  const auto a = pas_assemble(bits, cb32(), lut32(), 4, ConstantSigns{0});
  const auto b = pas_assemble(bits, cb32(), lut32(), 4, ConstantSigns{1});
  const auto c = pas_assemble(bits, cb32(), lut32(), 4, UniformSignSource(123));
  for (const auto& s : a[0].symbols)
    for (int v : s) EXPECT_GT(v, 0);
  for (const auto& s : b[0].symbols)
    for (int v : s) EXPECT_LT(v, 0);
  EXPECT_EQ(pas_disassemble(a, cb32(), lut32(), 4), bits);
  EXPECT_EQ(pas_disassemble(b, cb32(), lut32(), 4), bits);
  EXPECT_EQ(pas_disassemble(c, cb32(), lut32(), 4), bits);
}

TEST(PasFrame, UniformSignSourceIsBalancedAndSeeded) {
  UniformSignSource s(9), t(9), u(10);
  std::size_t ones = 0, diff = 0;
  for (int i = 0; i < 100000; ++i) {
    const auto x = s();
    ones += x;
    EXPECT_EQ(x, t());
    diff += x != u();
  }
  EXPECT_NEAR(ones / 1e5, 0.5, 0.01);
  EXPECT_GT(diff, 40000u);
}

TEST(PasFrame, FrameCsv) {
  const auto bits = random_bits(112, 5);
  const auto blocks = pas_assemble(bits, cb32(), lut32(), 2, ConstantSigns{0});
  std::ostringstream os;
  write_frames_csv(os, blocks);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "frame,slot,XI,XQ,YI,YQ,lane_XI,lane_XQ,lane_YI,lane_YQ");
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    EXPECT_EQ(line.substr(line.size() - 8), ",0,0,1,1");
  }
  EXPECT_EQ(rows, 16u);
  EXPECT_EQ(os.str().rfind("\n0,0,"), os.str().find("\n0,0,"));
}
