#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "gm3/metrics.hpp"
#include "gm3/models.hpp"
#include "gm3/tire_brush.hpp"

using namespace gm3;

static void BM_TireForces(benchmark::State& state) {
  TireParams p;
  TireInputs in;
  in.normal_load = 450.0;
  in.longitudinal_velocity = 4.0;
  in.wheel_speed = 14.0;
  in.lateral_velocity = -0.3;
  in.turn_radius = 12.0;
  for (auto _ : state) {
    const auto s = compute_slip(in, p);
    benchmark::DoNotOptimize(compute_forces(s, in, p));
  }
}
BENCHMARK(BM_TireForces);

static void BM_Gm3Derivative(benchmark::State& state) {
  const auto spec = state.range(0) == 0 ? make_bicycle() : make_cart();
  VehicleState s;
  s.vx = 3.0;
  s.yaw_rate = 0.2;
  const ModelCommand cmd{0.1, WheelSpeedCommand{10.0}, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(gm3_derivative(spec, s, cmd));
}
BENCHMARK(BM_Gm3Derivative)->Arg(0)->Arg(1);

static void BM_Gm3Step(benchmark::State& state) {
  const auto spec = make_cart();
  VehicleState s;
  s.vx = 3.0;
  const ModelCommand cmd{0.1, WheelSpeedCommand{13.0}, 0.0};
  for (auto _ : state) s = model_step("gm3", spec, s, cmd, 0.005);
  benchmark::DoNotOptimize(s);
}
BENCHMARK(BM_Gm3Step);

static void BM_DiscreteFrechet(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-50, 50);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<Point2> p(n), q(n);
  for (auto& v : p) v = {u(rng), u(rng)};
  for (auto& v : q) v = {u(rng), u(rng)};
  for (auto _ : state) benchmark::DoNotOptimize(discrete_frechet(p, q));
  state.SetComplexityN(static_cast<long>(n));
}
BENCHMARK(BM_DiscreteFrechet)->RangeMultiplier(4)->Range(64, 1024)->Complexity(benchmark::oNSquared);
BENCHMARK_MAIN();
