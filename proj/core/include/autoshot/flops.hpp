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
#include <cstdint>

#include <nlohmann/json.hpp>

#include "autoshot/arch.hpp"
#include "autoshot/network.hpp"

namespace autoshot {

/// Multiply-accumulate counts of one forward pass over cfg.frames frames.
/// Convolutions, linear layers and attention matrix products are counted;
/// normalization, activations, pooling and histogram binning are not.
struct FlopsReport {
  std::array<std::uint64_t, arch::kSearchBlocks> blocks{};
  std::uint64_t attention = 0;
  std::uint64_t similarity = 0;
  std::uint64_t head = 0;
  std::uint64_t total = 0;
};

std::uint64_t conv2d_spatial_macs(std::uint64_t cin, std::uint64_t cout, std::uint64_t t, std::uint64_t h, std::uint64_t w);
std::uint64_t conv1d_temporal_macs(std::uint64_t cin, std::uint64_t cout, std::uint64_t t, std::uint64_t h, std::uint64_t w);

/// MACs of one block reading a [T,H,W,in_channels] input.
std::uint64_t block_macs(const arch::BlockShape& shape, std::uint64_t t, std::uint64_t h, std::uint64_t w);

/// Q, K, V and output projections plus the two T x T products.
std::uint64_t attention_layer_macs(std::uint64_t t, std::uint64_t dim);

FlopsReport count_flops(const arch::ArchCode& code, const NetworkConfig& cfg);

nlohmann::json to_json(const FlopsReport& report);

}  // namespace autoshot
