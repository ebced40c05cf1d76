#include <benchmark/benchmark.h>

#include <cmath>

#include "multipeak/field_space.hpp"
#include "multipeak/ground_state.hpp"
#include "multipeak/reduction.hpp"

using namespace multipeak;

namespace {

std::shared_ptr<const FieldSpace> space_2d(int nodes) {
  return FieldSpace::create(GridSpec{Dimension::two(), 64.0, nodes}, std::exp(6.0));
}

const RadialProfile& profile_2d() {
  static const RadialProfile phi = [] {
    GroundStateParams params;
    params.p = 2.7;
    return solve_ground_state(params);
  }();
  return phi;
}

void bm_sine_transform(benchmark::State& state) {
  const auto space = space_2d(static_cast<int>(state.range(0)));
  const Field samples =
      space->sample_radial({0, 0, 0}, [](double s) { return std::exp(-s * s / 50.0); });
  for (auto _ : state) benchmark::DoNotOptimize(space->to_modal(samples));
}
BENCHMARK(bm_sine_transform)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void bm_hessian_apply(benchmark::State& state) {
  const auto space = space_2d(static_cast<int>(state.range(0)));
  const RadialProfile& phi = profile_2d();
  const EtaFunction u(space, space->sample_radial({0, 0, 0}, [&](double s) { return phi.value(s); }),
                      0.1);
  for (auto _ : state) benchmark::DoNotOptimize(hessian_apply(u, u, 2.7));
}
BENCHMARK(bm_hessian_apply)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void bm_ground_state(benchmark::State& state) {
  GroundStateParams params;
  params.dim = Dimension(static_cast<int>(state.range(0)));
  params.p = 2.7;
  for (auto _ : state) benchmark::DoNotOptimize(solve_ground_state(params));
}
BENCHMARK(bm_ground_state)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void bm_auxiliary_solve(benchmark::State& state) {
  const auto space = space_2d(512);
  const double eta = space->eta();
  const PeakConfiguration config{Dimension::two(), 2.7, eta, 9.27, SignPattern::alternating(2)};
  for (auto _ : state) {
    ReductionWorkspace ws(config, profile_2d(), space);
    benchmark::DoNotOptimize(ws.solve_auxiliary());
  }
}
BENCHMARK(bm_auxiliary_solve)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
