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

#include "autoshot/arch.hpp"
#include "autoshot/network.hpp"

namespace {

using autoshot::nn::Tensor;

autoshot::NetworkConfig desk_config() {
  autoshot::NetworkConfig cfg;
  cfg.height = 9;
  cfg.width = 16;
  cfg.filters = {2, 2, 4, 4, 8, 8};
  cfg.hidden = 64;
  cfg.similarity_projection = 16;
  cfg.similarity_features = 16;
  cfg.histogram_features = 16;
  return cfg;
}

// Inference over one batch of four 60-frame windows at desk resolution.
void BM_ModelForward(benchmark::State& state) {
  const auto cfg = desk_config();
  auto model = autoshot::build_network(autoshot::arch::autoshot_f1(), cfg, 1);
  std::mt19937_64 rng(1);
  const Tensor frames = Tensor::uniform({4, 60, cfg.height, cfg.width, 3}, rng, 0.0, 1.0);
  for (auto _ : state) {
    autoshot::nn::Graph g;
    autoshot::ForwardContext ctx(g, autoshot::nn::Phase::kEval);
    auto out = autoshot::forward(model, ctx, frames);
    benchmark::DoNotOptimize(out.single_frame.value().data());
  }
}
BENCHMARK(BM_ModelForward)->Unit(benchmark::kMillisecond);

// One training step's worth of forward and backward through a SuperNet path.
void BM_SuperNetTrainStep(benchmark::State& state) {
  const auto cfg = desk_config();
  auto net = autoshot::build_supernet(cfg, 2);
  std::mt19937_64 rng(2);
  const Tensor frames = Tensor::uniform({8, 60, cfg.height, cfg.width, 3}, rng, 0.0, 1.0);
  const auto path = autoshot::arch::autoshot_f1();
  for (auto _ : state) {
    autoshot::nn::Graph g;
    autoshot::ForwardContext ctx(g, autoshot::nn::Phase::kTrain, &rng, true);
    auto out = autoshot::forward(net, path, ctx, frames);
    g.backward(autoshot::nn::sum(out.single_frame));
  }
}
BENCHMARK(BM_SuperNetTrainStep)->Unit(benchmark::kMillisecond);

}  // namespace
