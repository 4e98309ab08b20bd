#include <benchmark/benchmark.h>

#include "hyperwind/dataset.hpp"
#include "hyperwind/plane.hpp"
#include "hyperwind/tree_boundary.hpp"
#include "hyperwind/walk.hpp"

using namespace hyperwind;

namespace {

WalkSpec simple_tree() {
  WalkSpec s;
  s.measure = StepMeasure::simple(2);
  s.projection = Projection::canonical(2);
  return s;
}

void BM_TreePathCheckpoints(benchmark::State& state) {
  const auto spec = simple_tree();
  ObservationPlan plan;
  plan.horizon = static_cast<std::size_t>(state.range(0));
  plan.stride = 100;
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sample_path(spec, plan, seed++));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TreePathCheckpoints)->Arg(1000)->Arg(10000);

void BM_TreePathWithRays(benchmark::State& state) {
  const auto spec = simple_tree();
  Alphabet ab(2);
  ObservationPlan plan;
  plan.horizon = static_cast<std::size_t>(state.range(0));
  plan.stride = 100;
  plan.stabilization = StabilizationParams{0.5, 0.87};
  plan.tree_refs = {BoundaryWord::periodic(Word{}, ab.parse("u")), BoundaryWord::periodic(Word{}, ab.parse("uV"))};
  plan.ray_times = {static_cast<double>(state.range(0) / 2)};
  plan.tracking = true;
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sample_path(spec, plan, seed++));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TreePathWithRays)->Arg(1000)->Arg(10000);

void BM_PlanePath(benchmark::State& state) {
  WalkSpec spec = simple_tree();
  spec.kind = ModelKind::plane;
  spec.schottky = plane::SchottkyModel::symmetric(2, 0.8);
  ObservationPlan plan;
  plan.horizon = static_cast<std::size_t>(state.range(0));
  plan.stride = 10;
  plan.plane_refs = {0.4, 2.0};
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sample_path(spec, plan, seed++));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PlanePath)->Arg(100);

void BM_BusemannCocycle(benchmark::State& state) {
  Alphabet ab(2);
  const auto xi = BoundaryWord::periodic(ab.parse("v"), ab.parse("uuV"));
  const Word g = power(ab.parse("uvUvv"), 20);
  for (auto _ : state) benchmark::DoNotOptimize(busemann_cocycle(g, xi));
}
BENCHMARK(BM_BusemannCocycle);

}  // namespace
BENCHMARK_MAIN();
