#include <cmath>

#include <gtest/gtest.h>

#include "hyperwind/dataset.hpp"
#include "hyperwind/error.hpp"
#include "hyperwind/martingale.hpp"

using namespace hyperwind;

namespace {

WalkSpec spec_of(StepMeasure mu) {
  WalkSpec s;
  s.measure = std::move(mu);
  s.projection = Projection::canonical(2);
  return s;
}

Dataset stopped(const WalkSpec& spec, std::vector<double> thresholds, double lambda, std::size_t horizon,
                std::size_t paths) {
  ObservationPlan p;
  p.horizon = horizon;
  p.stride = horizon;
  p.stopping = StoppingSpec{std::move(thresholds), lambda};
  return batch_run(spec, p, 555, paths, 1);
}

}  // namespace

TEST(Martingale, FosterOnDeterministicWalk) {
  Alphabet ab(2);
  const auto spec = spec_of(StepMeasure(2, {Atom{ab.parse("u"), 1.0, Rational(1)}}));
  const auto data = stopped(spec, {5.0, 20.0, 80.0}, 1.0, 100, 3);
  const auto r = foster_check(data);
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_DOUBLE_EQ(r.rows[1].mean_tau, 20.0);
  EXPECT_DOUBLE_EQ(r.rows[1].se, 0.0);
  EXPECT_TRUE(r.monotone);
  EXPECT_TRUE(r.pass);
}

TEST(Martingale, FosterOnSimpleWalk) {
  // |w_k| is a birth-death chain; from level j >= 1 the time to gain one
  // level is T_j = (4 + T_{j-1}) / 3 with T_0 = 1.
  const auto spec = spec_of(StepMeasure::simple(2));
  const auto data = stopped(spec, {40.0}, 0.5, 400, 2000);
  double expected = 0.0, tj = 1.0;
  for (int j = 0; j < 20; ++j) {
    expected += tj;
    tj = (4.0 + tj) / 3.0;
  }
  const auto r = foster_check(data);
  EXPECT_NEAR(r.rows[0].mean_tau, expected, 4.0 * r.rows[0].se);
  EXPECT_TRUE(r.pass);
}

TEST(Martingale, OvershootBoundedByLongestWord) {
  Alphabet ab(2);
  const auto mu = StepMeasure::uniform(2, {ab.parse("uu"), ab.parse("UU"), ab.parse("vvv"), ab.parse("V")});
  const auto spec = spec_of(mu);
  const auto data = stopped(spec, {20.0, 40.0, 80.0}, 1.0, 2000, 500);
  const auto r = overshoot_stats(data, 1.0, 1.0, mu.max_length());
  ASSERT_TRUE(r.exact_bound);
  EXPECT_TRUE(*r.exact_bound);
  for (const auto& row : r.rows) {
    EXPECT_GE(row.min, 0.0);
    EXPECT_LE(row.max, 3.0);
  }
  EXPECT_TRUE(overshoot_stats(Dataset{}, 1.0, 1.0, 3).rows.empty());
}

TEST(Martingale, FirstExit) {
  const std::vector<double> up = {0, 1, 2, 3, 4, 5, 6};
  EXPECT_EQ(first_exit(up, ExitWindow{1, 1, 2}), (ExitResult{1, 3}));
  const std::vector<double> down = {0, -1, -2, -3};
  EXPECT_EQ(first_exit(down, ExitWindow{1, 1, 2}), (ExitResult{-1, 3}));
  const std::vector<double> flat = {0, 0, 0};
  EXPECT_EQ(first_exit(flat, ExitWindow{1, 1, 2}).side, 0);
}

TEST(Martingale, SeriesAndIncrements) {
  PathRecord p;
  p.dim = 2;
  p.refs = 1;
  p.horizon = 20;
  p.steps = {0, 10, 20};
  p.t = {0, 6, 10};
  p.winding = {0, 0, 7, 1, 12, -2};
  p.busemann = {0, 6, 10};
  Dataset data;
  data.paths.push_back(p);
  const std::vector<double> e = {1.0, 0.0};
  const auto m = martingale_series(p, 0, e);
  EXPECT_EQ(m.at(1)[0], 1.0);
  EXPECT_EQ(m.at(2)[0], 2.0);
  EXPECT_EQ(m.at(2)[1], -2.0);
  const auto inc = increment_check(data, 0, e, 2);
  EXPECT_DOUBLE_EQ(inc.max_increment, 3.0);
  EXPECT_DOUBLE_EQ(inc.bound, 10.0 * 2.0 * 2.0);
  EXPECT_TRUE(inc.pass);
}

TEST(Martingale, PsiOfPeriodicSamples) {
  Alphabet ab(2);
  // Half the samples start with u, half with v: psi(u^inf) = mean product.
  std::vector<BoundaryWord> samples;
  for (int i = 0; i < 100; ++i) samples.push_back(BoundaryWord::periodic(ab.parse("uu"), ab.parse("v")));
  for (int i = 0; i < 100; ++i) samples.push_back(BoundaryWord::periodic(Word{}, ab.parse("v")));
  const auto x = BoundaryWord::periodic(Word{}, ab.parse("u"));
  const auto r = estimate_psi(x, samples);
  EXPECT_DOUBLE_EQ(r.value, 1.0);
  EXPECT_EQ(r.truncated, 0u);
  samples.resize(50);
  EXPECT_THROW(estimate_psi(x, samples), DomainError);
}

TEST(Martingale, PsiTruncationWarning) {
  Alphabet ab(2);
  const auto x = BoundaryWord::periodic(Word{}, ab.parse("u"));
  std::vector<BoundaryWord> samples(120, x);
  const auto r = estimate_psi(x, samples);
  EXPECT_EQ(r.truncated, 120u);
  EXPECT_TRUE(r.warning);
}
