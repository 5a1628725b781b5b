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

#include <vector>

#include "autoshot/graph.hpp"
#include "autoshot/tensor.hpp"

namespace autoshot::nn {

/// Temporal window compared by both similarity features.
inline const std::vector<int> kSimilarityOffsets = {-2, -1, 1, 2};

inline constexpr std::size_t kHistogramBinsPerChannel = 8;

/// Joint 8x8x8 RGB histogram of every frame, normalized to sum 1.
/// frames: [N,T,H,W,3] with values in [0,1] -> [N,T,512].
Tensor rgb_histograms(const Tensor& frames);

/// Histogram intersection between frame t and frames t+offset (clamped to
/// [0,T-1]). frames: [N,T,H,W,3] -> [N,T,offsets.size()], values in [0,1].
Tensor rgb_histogram_similarity(const Tensor& frames, const std::vector<int>& offsets = kSimilarityOffsets);

/// Projects frame features with (w, b) and compares each frame with its
/// temporal neighbours by cosine similarity. features: [N,T,D] -> [N,T,K].
Var learnable_cosine_similarity(Var features, Var w, Var b, const std::vector<int>& offsets = kSimilarityOffsets);

}  // namespace autoshot::nn
