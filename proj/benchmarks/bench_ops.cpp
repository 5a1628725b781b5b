// Copyright (c) 2026 AutoShot Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <random>

#include "autoshot/graph.hpp"
#include "autoshot/ops.hpp"

namespace {

using autoshot::nn::Graph;
using autoshot::nn::Tensor;

// args: spatial size (H = W * 9 / 16), channels in/out
void BM_Conv2dSpatial(benchmark::State& state) {
  const std::size_t w = state.range(0), h = w * 9 / 16, c = state.range(1);
  std::mt19937_64 rng(1);
  const Tensor x = Tensor::randn({2, 16, h, w, c}, rng);
  const Tensor k = Tensor::randn({3, 3, c, c}, rng, 0.1);
  const Tensor b = Tensor::zeros({c});
  for (auto _ : state) {
    Graph g;
    auto y = autoshot::nn::conv2d_spatial(g.constant(x), g.constant(k), g.constant(b));
    benchmark::DoNotOptimize(y.value().data());
  }
  state.counters["MAC/s"] = benchmark::Counter(static_cast<double>(2 * 16 * h * w * 9 * c * c),
                                               benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_Conv2dSpatial)->Args({16, 8})->Args({48, 16})->Args({48, 64})->Unit(benchmark::kMicrosecond);

void BM_Conv1dTemporal(benchmark::State& state) {
  const std::size_t w = state.range(0), h = w * 9 / 16, c = state.range(1);
  std::mt19937_64 rng(2);
  const Tensor x = Tensor::randn({2, 16, h, w, c}, rng);
  const Tensor k = Tensor::randn({3, c, c}, rng, 0.1);
  const Tensor b = Tensor::zeros({c});
  for (auto _ : state) {
    Graph g;
    auto y = autoshot::nn::conv1d_temporal(g.constant(x), g.constant(k), g.constant(b), 2);
    benchmark::DoNotOptimize(y.value().data());
  }
  state.counters["MAC/s"] = benchmark::Counter(static_cast<double>(2 * 16 * h * w * 3 * c * c),
                                               benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_Conv1dTemporal)->Args({16, 8})->Args({48, 16})->Args({48, 64})->Unit(benchmark::kMicrosecond);

void BM_Conv2dBackward(benchmark::State& state) {
  const std::size_t w = state.range(0), h = w * 9 / 16, c = state.range(1);
  std::mt19937_64 rng(3);
  const Tensor x = Tensor::randn({2, 16, h, w, c}, rng);
  const Tensor k = Tensor::randn({3, 3, c, c}, rng, 0.1);
  const Tensor b = Tensor::zeros({c});
  for (auto _ : state) {
    Graph g;
    auto y = autoshot::nn::conv2d_spatial(g.leaf(x, true), g.leaf(k, true), g.leaf(b, true));
    g.backward(autoshot::nn::sum(y));
  }
}
BENCHMARK(BM_Conv2dBackward)->Args({16, 8})->Args({48, 16})->Unit(benchmark::kMicrosecond);

}  // namespace
