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

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "autoshot/annotation.hpp"
#include "autoshot/frames.hpp"
#include "autoshot/metrics.hpp"
#include "autoshot/network.hpp"
#include "autoshot/sampling.hpp"

namespace autoshot {

struct LabeledVideo {
  std::string name;
  annot::FrameContainer frames;
  annot::ShotAnnotation annotation;
};

/// A corpus directory holds <name>.sbdf frame files with <name>.txt
/// annotations next to them.
void write_corpus(const std::filesystem::path& dir, const std::vector<LabeledVideo>& videos);
std::vector<LabeledVideo> load_corpus(const std::filesystem::path& dir);

train::ShotPool build_shot_pool(const std::vector<LabeledVideo>& videos, const NetworkConfig& cfg);

/// Runs a network on a [N,T,H,W,C] batch and returns both heads.
using ForwardFn = std::function<NetworkOutput(ForwardContext&, const nn::Tensor&)>;

struct InferenceConfig {
  std::size_t window = 60;      ///< frames per forward window
  std::size_t batch = 4;        ///< windows per forward pass
  nn::Phase phase = nn::Phase::kEval;
};

/// Per-frame single-frame-head probabilities over a whole video. Windows
/// advance by window/2 and each frame takes the prediction of the window in
/// which it is central; edges are padded by repeating the end frames.
std::vector<double> predict_video(const ForwardFn& forward, const NetworkConfig& cfg, const annot::FrameContainer& video,
                                  const InferenceConfig& inference = {});

struct CorpusEvaluation {
  metrics::EvalReport report;
  std::vector<metrics::ScoredVideo> scored;  ///< detections at the threshold
  std::vector<std::vector<double>> predictions;
};

CorpusEvaluation evaluate_corpus(const ForwardFn& forward, const NetworkConfig& cfg,
                                 const std::vector<LabeledVideo>& videos, const InferenceConfig& inference = {},
                                 double threshold = 0.5);

/// Detections for precision-at-recall sweeps: every local run above a low
/// floor, so lower thresholds can be explored.
std::vector<metrics::ScoredVideo> score_candidates(const CorpusEvaluation& eval, const std::vector<LabeledVideo>& videos,
                                                   double floor = 0.01);

}  // namespace autoshot
