#include <random>

#include <gtest/gtest.h>

#include "hyperwind/error.hpp"
#include "hyperwind/group.hpp"
#include "oracles.hpp"

using namespace hyperwind;

TEST(Group, ReductionMatchesStackOracle) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const int rank = 2 + static_cast<int>(rng() % 3);
    const auto w = oracle::random_word(rng, rank, rng() % 40);
    EXPECT_EQ(oracle::from_word(oracle::to_word(w)), oracle::free_reduce(w));
  }
}

TEST(Group, MultiplyInvertAssociate) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = oracle::to_word(oracle::random_word(rng, 3, rng() % 20));
    const auto b = oracle::to_word(oracle::random_word(rng, 3, rng() % 20));
    const auto c = oracle::to_word(oracle::random_word(rng, 3, rng() % 20));
    EXPECT_EQ(multiply(multiply(a, b), c), multiply(a, multiply(b, c)));
    EXPECT_TRUE(multiply(a, invert(a)).empty());
    EXPECT_EQ(oracle::from_word(multiply(a, b)),
              oracle::free_reduce(oracle::concat(oracle::from_word(a), oracle::from_word(b))));
  }
}

TEST(Group, AlphabetRoundTrip) {
  Alphabet ab(2);
  const Word w = ab.parse("uvUUv");
  EXPECT_EQ(ab.format(w), "uvUUv");
  EXPECT_EQ(ab.format(ab.parse("uUv")), "v");
  EXPECT_EQ(w.size(), 5u);
  EXPECT_EQ(ab.format(power(ab.parse("uv"), 3)), "uvuvuv");
}

TEST(Group, Abelianization) {
  Alphabet ab(2);
  const auto pi = Projection::canonical(2);
  EXPECT_EQ(abelianize(ab.parse("uuvU"), pi), (AbelianVector{1, 1}));
  EXPECT_EQ(abelianize(ab.parse("uvUV"), pi), (AbelianVector{0, 0}));
  Projection custom{1, {{2}, {-1}}};
  EXPECT_EQ(abelianize(ab.parse("uuV"), custom), (AbelianVector{5}));
}

TEST(Group, AbelianizationIsAHomomorphism) {
  std::mt19937_64 rng(3);
  const auto pi = Projection::canonical(3);
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = oracle::to_word(oracle::random_word(rng, 3, rng() % 15));
    const auto b = oracle::to_word(oracle::random_word(rng, 3, rng() % 15));
    auto sum = abelianize(a, pi);
    const auto ib = abelianize(b, pi);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += ib[i];
    EXPECT_EQ(abelianize(multiply(a, b), pi), sum);
  }
}

TEST(Group, StableLengthIsConjugationInvariant) {
  Alphabet ab(2);
  EXPECT_EQ(stable_length(ab.parse("uvU")), 1u);
  EXPECT_EQ(stable_length(ab.parse("uvvU")), 2u);
  EXPECT_EQ(stable_length(Word{}), 0u);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto g = oracle::to_word(oracle::random_word(rng, 2, 1 + rng() % 12));
    const auto h = oracle::to_word(oracle::random_word(rng, 2, rng() % 12));
    EXPECT_EQ(stable_length(multiply(multiply(h, g), invert(h))), stable_length(g));
    // |g^n| grows by the stable length per power once n is large.
    EXPECT_EQ(power(g, 6).size() - power(g, 5).size(), stable_length(g));
  }
}

TEST(Group, ProjectionValidation) {
  Projection bad{2, {{1, 0}}};
  EXPECT_THROW(bad.validate(2), Error);
  EXPECT_NO_THROW(Projection::canonical(2).validate(2));
}
