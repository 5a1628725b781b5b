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
#include <random>
#include <vector>

#include "autoshot/annotation.hpp"
#include "autoshot/arch.hpp"
#include "autoshot/frames.hpp"
#include "autoshot/tensor.hpp"

namespace autoshot::train {

/// Independent uniform draw of every block option and the attention depth.
arch::ArchCode sample_uniform_path(std::mt19937_64& rng);

/// Frames of one annotated shot, [L,H,W,3] scaled to [0,1].
struct ShotClip {
  nn::Tensor frames;
  std::size_t length() const { return frames.dim(0); }
};

using ShotPool = std::vector<ShotClip>;

/// Cuts every annotated shot out of `video` at network resolution.
void append_shots(ShotPool& pool, const annot::FrameContainer& video, const annot::ShotAnnotation& ann,
                  std::size_t height, std::size_t width);

struct SampleConfig {
  std::size_t frames = 60;  ///< N_F
  double gradual_probability = 0.3;
  std::size_t fade_min = 4;
  std::size_t fade_max = 12;
};

/// Two different shots joined by a hard cut or a linear cross-fade. z marks
/// every transition frame, y only the middle one.
struct TrainSample {
  nn::Tensor frames;  ///< [1,N_F,H,W,3]
  nn::Tensor y;       ///< [1,N_F]
  nn::Tensor z;       ///< [1,N_F]
  annot::TransitionSpan transition;
};

TrainSample make_training_sample(const ShotPool& pool, std::mt19937_64& rng, const SampleConfig& cfg = {});

struct Batch {
  nn::Tensor frames;  ///< [N,N_F,H,W,3]
  nn::Tensor y;       ///< [N,N_F]
  nn::Tensor z;       ///< [N,N_F]
};

Batch make_batch(const ShotPool& pool, std::mt19937_64& rng, const SampleConfig& cfg, std::size_t batch_size);

}  // namespace autoshot::train
