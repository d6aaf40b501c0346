#include <benchmark/benchmark.h>

#include "bubblelab/bubble.hpp"
#include "bubblelab/functionals.hpp"
#include "bubblelab/projection.hpp"
#include "bubblelab/rate.hpp"
#include "bubblelab/spectral.hpp"

using namespace bubblelab;

static void BM_RadialGrid(benchmark::State& state) {
  const Dimension dim(3);
  const GridSpec spec{1.0, static_cast<int>(state.range(0)), 16};
  for (auto _ : state) benchmark::DoNotOptimize(RadialGrid::make(dim, spec));
}
BENCHMARK(BM_RadialGrid)->Arg(16)->Arg(32)->Arg(64);

static void BM_BubbleIdentities(benchmark::State& state) {
  const Dimension dim(static_cast<int>(state.range(0)));
  auto grid = RadialGrid::make(dim);
  for (auto _ : state) benchmark::DoNotOptimize(bubble_identities(dim, 1.0, *grid));
}
BENCHMARK(BM_BubbleIdentities)->DenseRange(3, 6);

static void BM_OffCentreBubble(benchmark::State& state) {
  const Dimension dim(3);
  auto grid = RadialGrid::make(dim);
  const auto params = BubbleParams::on_axis(dim, 0.3, 1.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(eval_bubble(grid, params));
}
BENCHMARK(BM_OffCentreBubble)->Unit(benchmark::kMillisecond);

static void BM_Deficit(benchmark::State& state) {
  const Dimension dim(3);
  auto grid = RadialGrid::make(dim);
  const PerturbedBubble pb = make_perturbed_bubble(cap_profile(grid), 1e-3);
  for (auto _ : state) benchmark::DoNotOptimize(deficit(pb.u, &pb.K));
}
BENCHMARK(BM_Deficit);

static void BM_ProjectPerturbed(benchmark::State& state) {
  const Dimension dim(3);
  auto grid = RadialGrid::make(dim);
  const PerturbedBubble pb = make_perturbed_bubble(cap_profile(grid), 1e-3);
  ProjectionOptions opts;
  opts.K = &pb.K;
  for (auto _ : state) benchmark::DoNotOptimize(project_to_bubble(pb.u, opts));
}
BENCHMARK(BM_ProjectPerturbed)->Unit(benchmark::kMillisecond);

static void BM_WeightedSpectrum(benchmark::State& state) {
  const Dimension dim(3);
  const GridSpec spec{1.0, 8, 8};
  for (auto _ : state) benchmark::DoNotOptimize(weighted_spectrum(dim, 2, spec));
}
BENCHMARK(BM_WeightedSpectrum)->Unit(benchmark::kMillisecond);

static void BM_ImplicitStep(benchmark::State& state) {
  FlowConfig cfg;
  cfg.sphere_nodes = static_cast<int>(state.range(0));
  auto sphere = flow_sphere_grid(cfg);
  const FlowState s0{0.0, initial_data(cfg, sphere), 0.0, true, 0, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(step(s0, 1e-3));
}
BENCHMARK(BM_ImplicitStep)->Arg(16)->Arg(32)->Arg(64);

static void BM_FlowRun(benchmark::State& state) {
  FlowConfig cfg;
  cfg.s_end = 2.0;
  cfg.diagnostics = false;
  for (auto _ : state) benchmark::DoNotOptimize(run(cfg));
}
BENCHMARK(BM_FlowRun)->Unit(benchmark::kMillisecond);

static void BM_NearestStationary(benchmark::State& state) {
  FlowConfig cfg;
  auto sphere = flow_sphere_grid(cfg);
  const ZonalSphereField v = initial_data(cfg, sphere);
  for (auto _ : state) benchmark::DoNotOptimize(nearest_stationary(v));
}
BENCHMARK(BM_NearestStationary);
BENCHMARK_MAIN();
