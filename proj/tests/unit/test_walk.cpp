#include <cmath>

#include <gtest/gtest.h>

#include "hyperwind/dataset.hpp"
#include "hyperwind/error.hpp"
#include "hyperwind/rng.hpp"
#include "hyperwind/tree_boundary.hpp"
#include "hyperwind/walk.hpp"
#include "oracles.hpp"

using namespace hyperwind;

namespace {

WalkSpec srw() {
  WalkSpec s;
  s.measure = StepMeasure::simple(2);
  s.projection = Projection::canonical(2);
  return s;
}

WalkSpec deterministic_u() {
  Alphabet ab(2);
  WalkSpec s;
  s.measure = StepMeasure(2, {Atom{ab.parse("u"), 1.0, Rational(1)}});
  s.projection = Projection::canonical(2);
  return s;
}

ObservationPlan plan(std::size_t horizon) {
  ObservationPlan p;
  p.horizon = horizon;
  p.stride = 10;
  return p;
}

}  // namespace

TEST(Walk, CheckpointSteps) {
  auto p = plan(35);
  EXPECT_EQ(p.checkpoint_steps(), (std::vector<std::size_t>{0, 10, 20, 30, 35}));
  p.stride = 0;
  p.horizon = 100;
  EXPECT_EQ(p.effective_stride(), 10u);
}

TEST(Walk, SamePathForSameSeed) {
  const auto spec = srw();
  const auto p = plan(500);
  EXPECT_EQ(sample_path(spec, p, 42), sample_path(spec, p, 42));
  EXPECT_NE(sample_path(spec, p, 42).t, sample_path(spec, p, 43).t);
}

TEST(Walk, CheckpointsMatchReplayedPositions) {
  const auto spec = srw();
  Alphabet ab(2);
  auto p = plan(300);
  p.tree_refs = {BoundaryWord::periodic(Word{}, ab.parse("u")), BoundaryWord::periodic(Word{}, ab.parse("uV"))};
  const std::uint64_t seed = 99;
  const auto rec = sample_path(spec, p, seed);
  ASSERT_EQ(rec.steps.size(), p.checkpoint_steps().size());
  for (std::size_t c = 0; c < rec.steps.size(); ++c) {
    const Word w = position_at(spec, seed, rec.steps[c]);
    EXPECT_EQ(rec.t[c], static_cast<double>(w.size()));
    const auto pi = abelianize(w, spec.projection);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(rec.winding_at(c)[i], pi[i]);
    for (std::size_t j = 0; j < 2; ++j)
      EXPECT_EQ(rec.busemann_at(c)[j], static_cast<double>(horofunction(p.tree_refs[j], w)));
  }
}

TEST(Walk, ReplayStepsByOneAtom) {
  const auto spec = srw();
  std::vector<Word> seen;
  replay(spec, 5, 50, [&](std::size_t, std::span<const Letter> w) { seen.push_back(reduce(w)); });
  ASSERT_EQ(seen.size(), 51u);
  EXPECT_TRUE(seen.front().empty());
  for (std::size_t k = 1; k < seen.size(); ++k)
    EXPECT_EQ(oracle::distance(oracle::from_word(seen[k - 1]), oracle::from_word(seen[k])), 1);
}

TEST(Walk, DeterministicStoppingTimes) {
  auto p = plan(100);
  p.stopping = StoppingSpec{{3.0, 10.5, 40.0}, 1.0};
  const auto rec = sample_path(deterministic_u(), p, 1);
  ASSERT_EQ(rec.stopping.size(), 3u);
  EXPECT_EQ(rec.stopping[0].tau, 3);
  EXPECT_EQ(rec.stopping[1].tau, 11);
  EXPECT_EQ(rec.stopping[2].tau, 40);
  EXPECT_EQ(rec.stopping[2].winding, (AbelianVector{40, 0}));
}

TEST(Walk, CensoredStoppingTime) {
  auto p = plan(20);
  p.stopping = StoppingSpec{{50.0}, 1.0};
  const auto rec = sample_path(deterministic_u(), p, 1);
  EXPECT_EQ(rec.stopping[0].tau, kCensored);
}

TEST(Walk, RayWindingAndTrackingOnSimpleWalk) {
  const auto spec = srw();
  auto p = plan(2000);
  p.stabilization = StabilizationParams{0.5, 0.87};
  p.ray_times = {100, 500};
  p.tracking = true;
  const std::uint64_t seed = 7;
  const auto rec = sample_path(spec, p, seed);
  const auto xi = limit_boundary_point(rec, spec, p.stabilization);
  for (std::size_t i = 0; i < p.ray_times.size(); ++i) {
    const auto pi = abelianize(xi.prefix(static_cast<std::size_t>(p.ray_times[i])), spec.projection);
    for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(rec.ray_winding_at(i)[j], pi[j]);
  }
  // Max tracking distance against a direct evaluation along the replay.
  std::int64_t worst = 0;
  replay(spec, seed, 2000, [&](std::size_t, std::span<const Letter> w) {
    worst = std::max(worst, tracking_distance(reduce(w), xi));
  });
  EXPECT_EQ(rec.max_tracking, worst);
}

TEST(Walk, BatchIndependentOfWorkers) {
  const auto spec = srw();
  const auto p = plan(200);
  const auto a = batch_run(spec, p, 1234, 64, 1);
  const auto b = batch_run(spec, p, 1234, 64, 3);
  EXPECT_EQ(a.paths, b.paths);
  EXPECT_EQ(a.escape, b.escape);
  EXPECT_EQ(a.paths[5].seed, mix_seed(1234, 5));
}

TEST(Walk, SimpleWalkEscapeRate) {
  // Birth-death drift of |w_n|: (2k - 2) / (2k) = 1/2 on F_2.
  const auto data = batch_run(srw(), plan(2000), 77, 400, 1);
  EXPECT_NEAR(data.escape.mean()[0], 0.5, 4.0 * data.escape.standard_error() + 2.0 / 2000.0);
}

TEST(Walk, PlaneWalkRecords) {
  WalkSpec spec;
  spec.kind = ModelKind::plane;
  spec.measure = StepMeasure::simple(2);
  spec.projection = Projection::canonical(2);
  spec.schottky = plane::SchottkyModel::symmetric(2, 0.8);
  auto p = plan(50);
  p.plane_refs = {0.4};
  p.ray_times = {5};
  const auto a = sample_path(spec, p, 3);
  EXPECT_EQ(a, sample_path(spec, p, 3));
  EXPECT_GT(a.t.back(), 0.0);
  EXPECT_EQ(a.ray_winding.size(), 2u);
}
