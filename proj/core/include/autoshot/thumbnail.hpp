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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "autoshot/annotation.hpp"
#include "autoshot/frames.hpp"

namespace autoshot::annot {

struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> rgb;

  friend bool operator==(const Image&, const Image&) = default;
};

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kGroundTruthOnly{255, 0, 255};  ///< pink
inline constexpr Rgb kPredictionOnly{0, 255, 255};   ///< cyan
inline constexpr Rgb kBothAgree{255, 255, 255};      ///< light
inline constexpr Rgb kLightDigits{255, 255, 255};
inline constexpr Rgb kDarkDigits{0, 0, 0};

struct ThumbnailConfig {
  std::size_t cell_width = 48;
  std::size_t cell_height = 27;
  std::size_t columns = 10;
  std::size_t gutter = 0;
  Rgb background{0, 0, 0};
  bool frame_numbers = true;
  double luminance_threshold = 128.0;
};

/// 3x5 bitmap of a decimal digit; bit 2 of each row is the left column.
const std::array<std::uint8_t, 5>& digit_glyph(int digit);

/// Mean 0.299R + 0.587G + 0.114B over a w x h region at (x, y), clipped.
double region_luminance(const Image& img, std::size_t x, std::size_t y, std::size_t w, std::size_t h);

/// Draws `number` at (x, y) with 1-pixel spacing between glyphs.
void draw_number(Image& img, std::size_t x, std::size_t y, std::size_t number, const Rgb& color);

/// Tiles every frame row-major into a grid of resized cells, writes each
/// frame index in the upper-left corner (light on dark backgrounds, dark
/// otherwise) and outlines transition frames: ground truth only in pink,
/// prediction only in cyan, both in light.
Image render_thumbnail(const FrameContainer& frames, const ShotAnnotation* annotation,
                       const std::vector<Frame>* predictions, const ThumbnailConfig& cfg = {});

void write_ppm(std::ostream& out, const Image& img);
void write_ppm_file(const std::filesystem::path& path, const Image& img);

}  // namespace autoshot::annot
