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
#include "autoshot/gp.hpp"

namespace {

std::vector<autoshot::bo::Observation> random_observations(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> pick(0, autoshot::arch::search_space_size() - 1);
  std::uniform_real_distribution<double> score(0.5, 0.9);
  std::vector<autoshot::bo::Observation> obs;
  for (std::size_t i = 0; i < n; ++i) obs.push_back({autoshot::arch::decode_index(pick(rng)), score(rng)});
  return obs;
}

// Marginal-likelihood hyperparameter fit as run once per search epoch.
void BM_GpFit(benchmark::State& state) {
  const auto obs = random_observations(state.range(0), 7);
  autoshot::bo::GpFitConfig fit;
  for (auto _ : state) {
    auto model = autoshot::bo::gp_fit(obs, autoshot::bo::KernelParams{}, fit);
    benchmark::DoNotOptimize(&model);
  }
}
BENCHMARK(BM_GpFit)->Arg(48)->Arg(120)->Unit(benchmark::kMillisecond);

// Posterior queries used to rank the candidate pool.
void BM_GpPosterior(benchmark::State& state) {
  const auto obs = random_observations(state.range(0), 8);
  const autoshot::bo::GpModel model(obs, autoshot::bo::KernelParams{}, 0.7);
  const auto queries = random_observations(1000, 9);
  for (auto _ : state) {
    for (const auto& q : queries) benchmark::DoNotOptimize(model.posterior(q.arch));
  }
  state.SetItemsProcessed(state.iterations() * queries.size());
}
BENCHMARK(BM_GpPosterior)->Arg(48)->Arg(480)->Unit(benchmark::kMillisecond);

}  // namespace
