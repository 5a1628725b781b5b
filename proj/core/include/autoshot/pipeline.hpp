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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "autoshot/bo_search.hpp"
#include "autoshot/dataset.hpp"
#include "autoshot/network.hpp"
#include "autoshot/run_config.hpp"
#include "autoshot/synth.hpp"

namespace autoshot {

/// `count` synthetic videos named v0000, v0001, ...
std::vector<LabeledVideo> synth_corpus(const annot::SynthSpec& spec, std::size_t count, std::uint64_t seed);

struct CorpusSplit {
  std::vector<LabeledVideo> train;
  std::vector<LabeledVideo> validation;
  std::vector<LabeledVideo> test;
};

/// Deterministic split in corpus order: train, then validation, then test.
CorpusSplit split_corpus(std::vector<LabeledVideo> videos, double validation_fraction, double test_fraction);

/// F1 at cfg.threshold, or precision at cfg.recall_target.
double corpus_metric(const ForwardFn& forward, const std::vector<LabeledVideo>& videos, const RunConfig& cfg);

/// Scores a path with the shared SuperNet weights (batch statistics, no
/// dropout). Safe to call concurrently: the SuperNet is only read.
bo::EvalFn supernet_evaluator(SuperNet& net, const std::vector<LabeledVideo>& validation, const RunConfig& cfg);

ForwardFn model_forward(Model& model);
ForwardFn supernet_forward(SuperNet& net, const arch::ArchCode& path);

}  // namespace autoshot
