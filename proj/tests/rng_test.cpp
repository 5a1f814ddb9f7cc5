#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "dlmcol/rng.hpp"

using namespace dlmcol;

// Known-answer vectors published with the Random123 distribution (kat_vectors).
TEST(Philox, KnownAnswerZero) {
  const auto out = Philox4x32::encrypt({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerAllOnes) {
  const auto out = Philox4x32::encrypt({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPiDigits) {
  const auto out = Philox4x32::encrypt({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out[0], 0xd16cfe09u);
  EXPECT_EQ(out[1], 0x94fdccebu);
  EXPECT_EQ(out[2], 0x5001e420u);
  EXPECT_EQ(out[3], 0x24126ea1u);
}

TEST(Rng, StreamsAreReproducible) {
  Rng a = make_stream(7, StreamTag::init, 3, 2);
  Rng b = make_stream(7, StreamTag::init, 3, 2);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(Rng, StreamsDifferByTagIndexGeneration) {
  std::set<std::uint64_t> firsts;
  for (auto tag : {StreamTag::init, StreamTag::local_search, StreamTag::crossover, StreamTag::selection})
    for (std::uint64_t i = 0; i < 4; ++i)
      for (std::uint64_t g = 0; g < 3; ++g) firsts.insert(make_stream(11, tag, i, g)());
  EXPECT_EQ(firsts.size(), 4u * 4u * 3u);
}

TEST(Rng, UniformStaysInRange) {
  Rng r = make_stream(1, StreamTag::test, 0);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const int x = r.uniform_int(7);
    ASSERT_GE(x, 0);
    ASSERT_LT(x, 7);
    ++hist[static_cast<std::size_t>(x)];
  }
  for (int h : hist) EXPECT_NEAR(h, 10000, 500);  // ~5 sigma
  for (int i = 0; i < 1000; ++i) {
    const int y = r.uniform_range(3, 5);
    ASSERT_GE(y, 3);
    ASSERT_LE(y, 5);
    const double u = r.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, ShuffleIsPermutation) {
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  Rng r = make_stream(5, StreamTag::test, 1);
  auto w = v;
  shuffle(w.begin(), w.end(), r);
  EXPECT_NE(w, v);
  std::sort(w.begin(), w.end());
  EXPECT_EQ(w, v);
}
