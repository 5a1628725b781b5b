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

#include "autoshot/annotation.hpp"
#include "autoshot/frames.hpp"

namespace autoshot::testing {

/// Deterministic 100-frame 18x32 video with dark and bright stretches, used to
/// produce and check the committed golden thumbnail sheet.
inline annot::FrameContainer golden_frames() {
  annot::FrameContainer c(100, 18, 32);
  for (std::uint32_t t = 0; t < c.frames; ++t) {
    const bool bright = (t / 10) % 2 == 1;
    std::uint8_t* px = c.frame(t);
    for (std::uint32_t y = 0; y < c.height; ++y) {
      for (std::uint32_t x = 0; x < c.width; ++x) {
        std::uint8_t* p = px + (y * c.width + x) * 3;
        const unsigned base = bright ? 180u : 10u;
        p[0] = static_cast<std::uint8_t>(base + (x * 2 + t) % 60);
        p[1] = static_cast<std::uint8_t>(base + (y * 3 + 2 * t) % 60);
        p[2] = static_cast<std::uint8_t>(base + (x + y + 5 * t) % 60);
      }
    }
  }
  return c;
}

/// Hard cuts at 19 and 79 with a gradual span [44, 50].
inline annot::ShotAnnotation golden_annotation() { return {{{0, 19}, {20, 44}, {51, 79}, {80, 99}}}; }

/// Agrees with the cut at 19 and the gradual span at 47, misses 79 and adds 62.
inline std::vector<annot::Frame> golden_predictions() { return {19, 47, 62}; }

}  // namespace autoshot::testing
