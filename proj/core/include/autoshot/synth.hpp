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
#include "autoshot/frames.hpp"

namespace autoshot::annot {

/// Parameters of a synthetic annotated video. Each shot is a solid colour with
/// a static Gaussian texture that drifts over time; consecutive shots get
/// clearly different colours. Gradual transitions are linear cross-fades.
struct SynthSpec {
  std::size_t width = 48;
  std::size_t height = 27;
  /// Total length; when 0 the video has exactly `shot_count` shots.
  std::size_t total_frames = 300;
  std::size_t shot_count = 4;
  /// 2.59 s at 25 fps.
  double mean_shot_length = 65.0;
  /// Shot lengths are uniform in mean * [1 - spread, 1 + spread].
  double shot_length_spread = 0.5;
  std::size_t min_shot_length = 8;
  double gradual_probability = 0.0;
  std::size_t fade_min = 4;  ///< blended frames of a gradual transition
  std::size_t fade_max = 12;
  double texture_stddev = 18.0;
  double frame_noise_stddev = 3.0;
  double max_drift = 0.6;  ///< pixels per frame
  double min_color_distance = 160.0;
};

struct SynthVideo {
  FrameContainer frames;
  ShotAnnotation annotation;
  std::vector<TransitionSpan> plan;
};

/// Shot layout only (no pixels); throws std::invalid_argument for a spec
/// with zero shots or inconsistent ranges.
struct ShotPlan {
  ShotAnnotation annotation;
  std::vector<TransitionSpan> transitions;
  std::size_t total_frames = 0;
};
ShotPlan plan_shots(const SynthSpec& spec, std::mt19937_64& rng);

SynthVideo synth_video(const SynthSpec& spec, std::mt19937_64& rng);

/// Renders a video that follows an explicit annotation (fades fill the gaps).
FrameContainer render_annotated(const ShotAnnotation& ann, std::size_t total_frames, const SynthSpec& style,
                                std::mt19937_64& rng);

}  // namespace autoshot::annot
