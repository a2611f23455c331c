/*
Copyright 2026 The trajsep Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "trajsep/acoustics.h"
#include "trajsep/metrics.h"
#include "trajsep/pipeline.h"
#include "trajsep/scene.h"

namespace trajsep {
namespace {

RoomSpec Room(double t60) {
  RoomSpec room;
  room.dims = {6.0, 5.0, 3.0};
  room.t60 = t60;
  room.array_center = {3.0, 2.5, 1.5};
  return room;
}

std::vector<double> Noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.1);
  std::vector<double> x(n);
  for (double& v : x) v = g(rng);
  return x;
}

void BM_FoaRir(benchmark::State& state) {
  const RoomSpec room = Room(0.6);
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ComputeFoaRir(room, {4.2, 1.1, 2.0}, order));
  }
}
BENCHMARK(BM_FoaRir)->Arg(2)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_RenderMovingSource(benchmark::State& state) {
  const RoomSpec room = Room(0.4);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const std::vector<double> x = Noise(n, 1);
  PositionPath path;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / n;
    path.positions.push_back(Vec3{1.5 + 3.0 * t, 1.0 + 2.0 * t, 1.7});
  }
  const int order = std::min(DefaultMaxOrder(room), 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(RenderMovingSource(x, path, room, order));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_RenderMovingSource)->Arg(16000)->Arg(64000)->Unit(benchmark::kMillisecond);

void BM_Sdr(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const std::vector<double> t = Noise(n, 2);
  std::vector<double> e = Noise(n, 3);
  for (std::size_t i = 0; i < n; ++i) e[i] += t[i];
  for (auto _ : state) benchmark::DoNotOptimize(SdrDb(e, t));
}
BENCHMARK(BM_Sdr)->Arg(16000)->Arg(160000)->Unit(benchmark::kMillisecond);

void BM_UpitAssign(benchmark::State& state) {
  const std::size_t c = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::vector<double> cost(c * c);
  for (double& v : cost) v = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(UpitAssign(cost, c));
}
BENCHMARK(BM_UpitAssign)->DenseRange(2, 8);

}  // namespace
}  // namespace trajsep

BENCHMARK_MAIN();
