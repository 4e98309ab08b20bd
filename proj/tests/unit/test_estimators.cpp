#include <cmath>

#include <gtest/gtest.h>

#include "hyperwind/dataset.hpp"
#include "hyperwind/error.hpp"
#include "hyperwind/estimators.hpp"

using namespace hyperwind;

namespace {

StepMeasure example_anu() {
  Alphabet ab(2);
  return StepMeasure(2, {Atom{ab.parse("u"), 1.0 / 3, Rational(1, 3)}, Atom{ab.parse("uv"), 1.0 / 3, Rational(1, 3)},
                         Atom{ab.parse("uV"), 1.0 / 3, Rational(1, 3)}});
}

}  // namespace

TEST(Estimators, ExactMomentsOfExampleMeasure) {
  const auto m = exact_abelian_moments(example_anu(), Projection::canonical(2));
  ASSERT_TRUE(m.exact);
  EXPECT_EQ(m.mean_exact, (std::vector<Rational>{Rational(1), Rational(0)}));
  // Second coordinate is 0, 1, -1 with equal weights; the first is constant.
  EXPECT_EQ(m.covariance_exact,
            (std::vector<Rational>{Rational(0), Rational(0), Rational(0), Rational(2, 3)}));
  ASSERT_TRUE(m.determinant_exact);
  EXPECT_EQ(*m.determinant_exact, Rational(0));
}

TEST(Estimators, ExactMomentsOfSimpleWalk) {
  const auto m = exact_abelian_moments(StepMeasure::simple(2), Projection::canonical(2));
  EXPECT_EQ(m.mean_exact, (std::vector<Rational>{Rational(0), Rational(0)}));
  EXPECT_EQ(m.covariance_exact,
            (std::vector<Rational>{Rational(1, 2), Rational(0), Rational(0), Rational(1, 2)}));
  EXPECT_EQ(*m.determinant_exact, Rational(1, 4));
  EXPECT_DOUBLE_EQ(m.determinant, 0.25);
}

TEST(Estimators, CertificateForExampleMeasure) {
  const auto c = nondegeneracy_certificate(example_anu(), Projection::canonical(2), 4);
  EXPECT_EQ(c.verdict, Verdict::nondegenerate);
  EXPECT_EQ(c.rank, 2u);
  EXPECT_GT(c.residual, c.threshold);
  // phi(e1) = 1 and phi(e1 + e2) = phi(e1 - e2) = 2 cannot hold together.
  ASSERT_EQ(c.witness.size(), 3u);
  for (const auto& row : c.witness) EXPECT_DOUBLE_EQ(row.stable_length, static_cast<double>(row.element.size()));
  EXPECT_GT(c.witness_residual, 0.0);
  EXPECT_EQ(to_string(c.verdict), "NONDEGENERATE");
}

TEST(Estimators, CertificateInconclusiveWhenLinear) {
  Alphabet ab(2);
  // Positive words only: stable length equals phi(x) = x1 + x2.
  StepMeasure positive(2, {Atom{ab.parse("u"), 0.5, Rational(1, 2)}, Atom{ab.parse("v"), 0.5, Rational(1, 2)}});
  const auto c = nondegeneracy_certificate(positive, Projection::canonical(2), 4);
  EXPECT_EQ(c.verdict, Verdict::inconclusive);
  EXPECT_LT(c.residual, 1e-9);
  ASSERT_EQ(c.phi.size(), 2u);
  EXPECT_NEAR(c.phi[0], 1.0, 1e-9);
  EXPECT_NEAR(c.phi[1], 1.0, 1e-9);

  StepMeasure cyclic(2, {Atom{ab.parse("u"), 0.5, Rational(1, 2)}, Atom{ab.parse("U"), 0.5, Rational(1, 2)}});
  const auto e = nondegeneracy_certificate(cyclic, Projection::canonical(2), 4);
  EXPECT_EQ(e.verdict, Verdict::inconclusive);
  EXPECT_TRUE(e.elementary);
}

TEST(Estimators, CompareRoutes) {
  CovarianceEstimate a, b;
  a.dim = b.dim = 1;
  a.matrix = {1.0};
  b.matrix = {1.25};
  a.se = {0.05};
  b.se = {0.05};
  const auto r = compare_routes(a, b);
  EXPECT_NEAR(r.max_z, 0.25 / std::hypot(0.05, 0.05), 1e-12);
  EXPECT_FALSE(r.agree);
  b.matrix = {1.1};
  EXPECT_TRUE(compare_routes(a, b).agree);
}

namespace {

// Deterministic walk u^n with a +-1 second coordinate: t_n = n, h_x(w_n) = n
// for a reference point x away from u^inf.
Dataset straight_line(std::size_t paths, std::size_t horizon, std::size_t stride) {
  Dataset data;
  for (std::size_t i = 0; i < paths; ++i) {
    PathRecord p;
    p.horizon = horizon;
    p.dim = 2;
    p.refs = 1;
    for (std::size_t k = 0; k <= horizon; k += stride) {
      p.steps.push_back(k);
      p.t.push_back(static_cast<double>(k));
      p.winding.push_back(static_cast<std::int64_t>(k));
      p.winding.push_back(static_cast<std::int64_t>(i % 2 ? 1 : -1));
      p.busemann.push_back(static_cast<double>(k));
    }
    data.paths.push_back(std::move(p));
  }
  accumulate(data);
  return data;
}

}  // namespace

TEST(Estimators, LambdaOnStraightLine) {
  const auto data = straight_line(10, 2000, 100);
  const std::vector<double> mean = {1.0, 0.0};
  const auto d = estimate_lambda(data, mean);
  EXPECT_DOUBLE_EQ(d.lambda, 1.0);
  EXPECT_NEAR(d.slope, 1.0, 1e-12);
  EXPECT_FALSE(d.disagreement);
  EXPECT_EQ(d.drift, (std::vector<double>{1.0, 0.0}));
  EXPECT_THROW(estimate_lambda(straight_line(4, 200, 100), mean), DomainError);
}

TEST(Estimators, FormulaRouteOnStraightLine) {
  const auto data = straight_line(10, 2000, 100);
  const std::vector<double> e = {1.0, 0.0};
  // M = (n, +-1) - n e = (0, +-1).
  const auto c = estimate_Anu_formula(data, 0, 1000, e, 1.0);
  EXPECT_NEAR(c.matrix[0], 0.0, 1e-12);
  EXPECT_NEAR(c.matrix[1], 0.0, 1e-12);
  EXPECT_NEAR(c.matrix[3], 1.0 / 1000.0, 1e-12);
  EXPECT_EQ(c.samples, 10u);
}
