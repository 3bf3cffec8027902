#include <benchmark/benchmark.h>

#include <cmath>

#include "embo/dynamics.hpp"
#include "embo/gain.hpp"
#include "embo/hysteresis.hpp"
#include "embo/structure.hpp"
#include "fixtures.hpp"

namespace {

using namespace embo;

void BM_StepWall(benchmark::State& state) {
  const auto p = testing::saws();
  auto s = HystereticWallState::virgin(p);
  double t = 0.0;
  for (auto _ : state) {
    t += 0.01;
    const WallStep r = step_wall(s, p, 45.0 * std::sin(t) * (1.0 + 0.3 * std::sin(0.07 * t)));
    s = r.state;
    benchmark::DoNotOptimize(r.force);
  }
}
BENCHMARK(BM_StepWall);

void BM_GlobalRestoring(benchmark::State& state) {
  const BuildingModel m = testing::box_building(static_cast<int>(state.range(0)));
  const auto maps = m.drift_maps();
  const auto states = virgin_states(m);
  Vector q = Vector::Zero(m.n_dofs());
  for (int i = 0; i < m.n_dofs(); ++i) q[i] = 0.004 * (i % 3 == 2 ? 0.01 : 1.0) * (1 + i / 3);
  for (auto _ : state) {
    auto r = global_restoring(m, maps, states, q);
    benchmark::DoNotOptimize(r.force.data());
  }
  state.SetLabel(std::to_string(m.n_walls()) + " walls");
}
BENCHMARK(BM_GlobalRestoring)->Arg(1)->Arg(4)->Arg(8);

void BM_TraceP(benchmark::State& state) {
  const BuildingModel m = testing::box_building(static_cast<int>(state.range(0)));
  const auto lin = LinearizedModel::from(m);
  const auto grid = FrequencyGrid::for_model(lin.mass, lin.stiffness);
  const int n = m.n_dofs();
  const ObserverConfig obs{{n - 3, n - 2, n - 1}, Vector::Constant(3, 500.0)};
  const NoiseModel noise{Matrix::Identity(2, 2) * 1e-2, Matrix::Identity(3, 3) * 1e-6};
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(trace_P(lin, obs, noise, grid, threads));
  state.SetLabel(std::to_string(grid.omegas.size()) + " frequencies");
}
BENCHMARK(BM_TraceP)->Args({2, 1})->Args({6, 1})->Args({6, 4})->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  const BuildingModel m = testing::box_building(static_cast<int>(state.range(0)));
  const int steps = 2000;
  const Matrix ug = testing::shaking(steps, 0.01, 4.0);
  IntegratorSettings s;
  s.dt = 0.01;
  for (auto _ : state) {
    auto h = simulate(m, ug, s);
    benchmark::DoNotOptimize(h.q.data());
  }
  state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_Simulate)->Arg(1)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
