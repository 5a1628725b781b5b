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
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "autoshot/tensor.hpp"

namespace autoshot::annot {

/// 8-bit RGB frames stored frame-major, row-major, interleaved channels.
/// Serialized as "SBDF", then T, H, W as little-endian u32, then the bytes.
struct FrameContainer {
  std::uint32_t frames = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<std::uint8_t> rgb;

  FrameContainer() = default;
  FrameContainer(std::uint32_t t, std::uint32_t h, std::uint32_t w);

  std::size_t frame_bytes() const { return static_cast<std::size_t>(height) * width * 3; }
  std::uint8_t* frame(std::size_t t) { return rgb.data() + t * frame_bytes(); }
  const std::uint8_t* frame(std::size_t t) const { return rgb.data() + t * frame_bytes(); }

  friend bool operator==(const FrameContainer&, const FrameContainer&) = default;
};

void validate(const FrameContainer& c);

void write_sbdf(std::ostream& out, const FrameContainer& c);
FrameContainer read_sbdf(std::istream& in);
void write_sbdf_file(const std::filesystem::path& path, const FrameContainer& c);
FrameContainer read_sbdf_file(const std::filesystem::path& path);

/// Bilinear resize with half-pixel centers and edge clamping; results are
/// rounded to the nearest integer.
std::vector<std::uint8_t> resize_bilinear(const std::uint8_t* rgb, std::size_t in_h, std::size_t in_w, std::size_t out_h,
                                          std::size_t out_w);
FrameContainer resize_frames(const FrameContainer& c, std::size_t out_h, std::size_t out_w);

/// Frames [first, first + count) (indices clamped to the video) as a
/// [1,count,H,W,3] tensor scaled to [0,1], resized to out_h x out_w.
nn::Tensor frames_to_tensor(const FrameContainer& c, std::int64_t first, std::size_t count, std::size_t out_h,
                            std::size_t out_w);

}  // namespace autoshot::annot
