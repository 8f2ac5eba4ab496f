#include <benchmark/benchmark.h>

#include "tomobss/covariance.hpp"
#include "tomobss/estimation.hpp"
#include "tomobss/kernels.hpp"
#include "tomobss/separation.hpp"
#include "tomobss/simulator.hpp"

using namespace tomobss;

namespace {

SimulationConfig two_scatterer_scene(std::size_t looks) {
  SimulationConfig cfg;
  const double rho = rayleigh_resolution(cfg.geometry);
  cfg.scatterers = {{40.0, 1.2, {}}, {40.0 + rho, 1.0, {}}};
  cfg.looks = looks;
  cfg.seed = 7;
  return cfg;
}

void BM_DrawStack(benchmark::State& state) {
  const auto cfg = two_scatterer_scene(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(draw_stack(cfg));
}
BENCHMARK(BM_DrawStack)->Arg(100)->Arg(900);

void BM_KernelMatrix(benchmark::State& state) {
  const auto c = sample_covariance(draw_stack(two_scatterer_scene(900)));
  const auto kernel = state.range(0) == 0 ? KernelSpec::gaussian_auto(5.0) : KernelSpec::polynomial(1.3);
  for (auto _ : state) benchmark::DoNotOptimize(kernel_matrix(c, kernel));
}
BENCHMARK(BM_KernelMatrix)->Arg(0)->Arg(1);

void BM_SeparateScatterers(benchmark::State& state) {
  const auto c = sample_covariance(draw_stack(two_scatterer_scene(900)));
  SeparationOptions options;
  options.refine_pair = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(separate_scatterers(c, options));
}
BENCHMARK(BM_SeparateScatterers)->Arg(0)->Arg(1);

void BM_Periodogram(benchmark::State& state) {
  const auto geom = AcquisitionGeometry::default_simulation();
  const CVector y = steering_vector(geom, 40.0).values();
  const auto grid = PeriodogramGrid::default_for(geom);
  for (auto _ : state) benchmark::DoNotOptimize(periodogram(y, geom, grid, {true, false}));
}
BENCHMARK(BM_Periodogram);

}  // namespace

BENCHMARK_MAIN();
