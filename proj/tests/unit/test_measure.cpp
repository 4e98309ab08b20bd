#include <gtest/gtest.h>

#include "hyperwind/error.hpp"
#include "hyperwind/measure.hpp"

using namespace hyperwind;

namespace {

Atom atom(const Alphabet& ab, const char* w, Rational p) {
  return Atom{ab.parse(w), boost::rational_cast<double>(p), p};
}

}  // namespace

TEST(Measure, SimpleWalk) {
  const auto mu = StepMeasure::simple(2);
  EXPECT_EQ(mu.size(), 4u);
  EXPECT_TRUE(mu.exact());
  EXPECT_EQ(mu.max_length(), 1u);
  for (const auto& a : mu.atoms()) EXPECT_EQ(*a.exact, Rational(1, 4));
}

TEST(Measure, PickCoversAtomsInProportion) {
  Alphabet ab(2);
  StepMeasure mu(2, {atom(ab, "u", Rational(1, 4)), atom(ab, "v", Rational(3, 4))});
  EXPECT_EQ(mu.pick(0), 0u);
  EXPECT_EQ(mu.pick(0x3FFFFFFFu), 0u);
  EXPECT_EQ(mu.pick(0x40000000u), 1u);
  EXPECT_EQ(mu.pick(0xFFFFFFFFu), 1u);
}

TEST(Measure, RejectsBadProbabilities) {
  Alphabet ab(2);
  EXPECT_THROW(StepMeasure(2, {atom(ab, "u", Rational(-1, 2)), atom(ab, "v", Rational(3, 2))}), MeasureError);
  EXPECT_THROW(StepMeasure(2, {atom(ab, "u", Rational(1, 2)), atom(ab, "v", Rational(1, 3))}), MeasureError);
  EXPECT_THROW(StepMeasure(2, {atom(ab, "u", Rational(1, 2)), Atom{Word{}, 0.5, Rational(1, 2)}}), MeasureError);
  EXPECT_THROW(StepMeasure(2, {}), MeasureError);
  EXPECT_THROW(StepMeasure(1, {atom(Alphabet(1), "u", Rational(1))}), MeasureError);
}

TEST(Measure, ParseRational) {
  EXPECT_EQ(parse_rational("1/3"), Rational(1, 3));
  EXPECT_EQ(parse_rational("2/4"), Rational(1, 2));
  EXPECT_EQ(parse_rational("5"), Rational(5));
  EXPECT_THROW(parse_rational("x/3"), MeasureError);
}

TEST(Measure, NonElementaryCertificate) {
  Alphabet ab(2);
  const auto simple = validate_measure(StepMeasure::simple(2));
  EXPECT_TRUE(simple.probabilities_ok);
  EXPECT_TRUE(simple.certified);
  ASSERT_TRUE(simple.witness);
  EXPECT_NE(multiply(simple.witness->first, simple.witness->second),
            multiply(simple.witness->second, simple.witness->first));

  // Supported on the cyclic subgroup <u>: elementary.
  StepMeasure cyclic(2, {atom(ab, "u", Rational(1, 2)), atom(ab, "U", Rational(1, 2))});
  const auto r = validate_measure(cyclic);
  EXPECT_FALSE(r.certified);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Measure, SemigroupProducts) {
  Alphabet ab(2);
  StepMeasure mu(2, {atom(ab, "u", Rational(1, 2)), atom(ab, "U", Rational(1, 2))});
  const auto prods = semigroup_products(mu, 2);
  // u, U, uu, UU; the identity is dropped.
  ASSERT_EQ(prods.size(), 4u);
  EXPECT_EQ(ab.format(prods[2]), "uu");
}
