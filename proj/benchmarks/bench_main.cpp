#include <mixed_spectra/eigensolve.hpp>
#include <mixed_spectra/mesh.hpp>
#include <mixed_spectra/verify.hpp>

#include <benchmark/benchmark.h>

#include <memory>

using namespace mixed_spectra;

namespace {

LabeledPolygon pentagon() {
  return make_polygon({Point(0, 0), Point(3, 0), Point(2.6, 1), Point(1.5, 1.6), Point(0.4, 1)},
                      {SideLabel::Neumann, SideLabel::Dirichlet, SideLabel::Dirichlet, SideLabel::Dirichlet,
                       SideLabel::Dirichlet});
}

void BM_Refine(benchmark::State& state) {
  const auto p = pentagon();
  const int level = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mesh_at_level(p, level));
}
BENCHMARK(BM_Refine)->DenseRange(3, 6)->Unit(benchmark::kMillisecond);

void BM_AssembleP2(benchmark::State& state) {
  const auto m = std::make_shared<const Mesh>(mesh_at_level(pentagon(), static_cast<int>(state.range(0))));
  const auto space = std::make_shared<const FeSpace>(m, Order::P2);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_operators(space));
  state.counters["dofs"] = static_cast<double>(space->num_dofs());
}
BENCHMARK(BM_AssembleP2)->DenseRange(3, 6)->Unit(benchmark::kMillisecond);

void BM_SmallestEigenpair(benchmark::State& state) {
  const auto p = pentagon();
  const auto d = build_levels(p, {static_cast<int>(state.range(0)), static_cast<int>(state.range(0))}, Order::P2);
  const auto sys = d.front().system(p.labels());
  for (auto _ : state) benchmark::DoNotOptimize(smallest_eigenpair(sys).eigenvalue);
  state.counters["free"] = static_cast<double>(sys.num_free());
}
BENCHMARK(BM_SmallestEigenpair)->DenseRange(3, 6)->Unit(benchmark::kMillisecond);

void BM_VerifySplit(benchmark::State& state) {
  const auto p = pentagon();
  VerifyConfig c;
  c.levels = {3, static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(verify_split(p, 0, c).margin);
}
BENCHMARK(BM_VerifySplit)->DenseRange(5, 6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
