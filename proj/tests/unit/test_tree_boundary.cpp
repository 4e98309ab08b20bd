#include <random>

#include <gtest/gtest.h>

#include "hyperwind/error.hpp"
#include "hyperwind/tree_boundary.hpp"
#include "oracles.hpp"

using namespace hyperwind;

namespace {

oracle::IntWord periodic_prefix(const oracle::IntWord& prefix, const oracle::IntWord& period, std::size_t n) {
  oracle::IntWord out = prefix;
  while (out.size() < n) out.insert(out.end(), period.begin(), period.end());
  out.resize(n);
  return out;
}

}  // namespace

TEST(TreeBoundary, PeriodicWordLetters) {
  Alphabet ab(2);
  const auto xi = BoundaryWord::periodic(ab.parse("vv"), ab.parse("u"));
  EXPECT_EQ(ab.format(xi.prefix(6)), "vvuuuu");
  const auto eta = BoundaryWord::periodic(Word{}, ab.parse("uV"));
  EXPECT_EQ(ab.format(eta.prefix(5)), "uVuVu");
}

TEST(TreeBoundary, FiniteWordExhausts) {
  Alphabet ab(2);
  const auto xi = BoundaryWord::finite(ab.parse("uv"));
  EXPECT_NO_THROW(xi.require(2));
  EXPECT_THROW(xi.require(3), OracleExhausted);
  EXPECT_FALSE(xi.try_require(3));
}

TEST(TreeBoundary, HorofunctionValues) {
  Alphabet ab(2);
  const auto xi = BoundaryWord::periodic(Word{}, ab.parse("u"));
  EXPECT_EQ(horofunction(xi, ab.parse("uuu")), -3);
  EXPECT_EQ(horofunction(xi, ab.parse("v")), 1);
  EXPECT_EQ(horofunction(xi, ab.parse("uuv")), -1);
  EXPECT_EQ(horofunction(xi, Word{}), 0);
}

TEST(TreeBoundary, CocycleMatchesDistanceLimit) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto g = oracle::random_word(rng, 2, rng() % 20);
    const oracle::IntWord period = {rng() % 2 ? 1 : -1, rng() % 2 ? 2 : -2};
    const auto prefix = oracle::free_reduce(oracle::random_word(rng, 2, rng() % 6));
    // Periodic tails must continue the prefix reduced.
    if (!prefix.empty() && prefix.back() == -period.front()) continue;
    const auto xi = BoundaryWord::periodic(oracle::to_word(prefix), oracle::to_word(period));
    const auto expected = oracle::busemann_by_limit(g, periodic_prefix(prefix, period, 200));
    EXPECT_EQ(busemann_cocycle(oracle::to_word(g), xi), expected);
  }
}

TEST(TreeBoundary, CocycleRelation) {
  std::mt19937_64 rng(19);
  Alphabet ab(3);
  const auto xi = BoundaryWord::periodic(ab.parse("w"), ab.parse("uv"));
  for (int trial = 0; trial < 1000; ++trial) {
    const auto g1 = oracle::to_word(oracle::random_word(rng, 3, rng() % 15));
    const auto g2 = oracle::to_word(oracle::random_word(rng, 3, rng() % 15));
    EXPECT_EQ(busemann_cocycle(multiply(g1, g2), xi),
              busemann_cocycle(g1, translate(g2, xi)) + busemann_cocycle(g2, xi));
    EXPECT_LE(std::abs(busemann_cocycle(g1, xi)), static_cast<std::int64_t>(g1.size()));
  }
}

TEST(TreeBoundary, TranslateReduces) {
  Alphabet ab(2);
  const auto xi = BoundaryWord::periodic(Word{}, ab.parse("u"));
  EXPECT_EQ(ab.format(translate(ab.parse("vUU"), xi).prefix(4)), "vuuu");
}

TEST(TreeBoundary, GromovProducts) {
  Alphabet ab(2);
  EXPECT_EQ(gromov_product(ab.parse("uvu"), ab.parse("uvv")), 2u);
  const auto a = BoundaryWord::periodic(Word{}, ab.parse("u"));
  const auto b = BoundaryWord::periodic(ab.parse("uu"), ab.parse("v"));
  EXPECT_EQ(gromov_product(a, b, 100), 2u);
  EXPECT_EQ(gromov_product(a, a, 50), 50u);
}

TEST(TreeBoundary, RayPointAndTracking) {
  Alphabet ab(2);
  const auto xi = BoundaryWord::periodic(Word{}, ab.parse("uv"));
  EXPECT_EQ(ab.format(ray_point(xi, 3).point), "uvu");
  EXPECT_EQ(tracking_distance(ab.parse("uvu"), xi), 0);
  EXPECT_EQ(tracking_distance(ab.parse("uvv"), xi), 2);
  EXPECT_EQ(tracking_distance(ab.parse("vv"), xi), 4);
}
