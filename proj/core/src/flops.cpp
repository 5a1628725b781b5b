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

#include "autoshot/flops.hpp"

namespace autoshot {

std::uint64_t conv2d_spatial_macs(std::uint64_t cin, std::uint64_t cout, std::uint64_t t, std::uint64_t h, std::uint64_t w) {
  return 9 * cin * cout * t * h * w;
}

std::uint64_t conv1d_temporal_macs(std::uint64_t cin, std::uint64_t cout, std::uint64_t t, std::uint64_t h, std::uint64_t w) {
  return 3 * cin * cout * t * h * w;
}

std::uint64_t block_macs(const arch::BlockShape& s, std::uint64_t t, std::uint64_t h, std::uint64_t w) {
  arch::validate(s);
  const std::uint64_t spatial = s.spatial_convs * conv2d_spatial_macs(s.in_channels, s.spatial_out, t, h, w);
  const std::uint64_t temporal = s.branches * conv1d_temporal_macs(s.temporal_in, s.temporal_out, t, h, w);
  return spatial + temporal;
}

std::uint64_t attention_layer_macs(std::uint64_t t, std::uint64_t dim) { return 4 * t * dim * dim + 2 * t * t * dim; }

FlopsReport count_flops(const arch::ArchCode& code, const NetworkConfig& cfg) {
  const NetworkWidths widths = network_widths(code, cfg);
  const auto sizes = block_output_sizes(cfg);
  const std::uint64_t t = cfg.frames;
  FlopsReport r;
  std::uint64_t width_sum = 0;
  for (std::size_t i = 0; i < arch::kSearchBlocks; ++i) {
    const auto shape = arch::block_shape(code.blocks[i], cfg.filters[i], widths.block_in[i]);
    r.blocks[i] = block_macs(shape, t, sizes[i].height, sizes[i].width);
    width_sum += widths.block_out[i];
  }
  r.attention = static_cast<std::uint64_t>(code.attention_layers) * attention_layer_macs(t, widths.frame_features);
  const std::uint64_t k = cfg.similarity_offsets.size();
  r.similarity = t * (width_sum * cfg.similarity_projection + k * cfg.similarity_features + k * cfg.histogram_features);
  r.head = t * (widths.head_input * cfg.hidden + 2 * cfg.hidden);
  r.total = r.attention + r.similarity + r.head;
  for (auto b : r.blocks) r.total += b;
  return r;
}

nlohmann::json to_json(const FlopsReport& report) {
  return {{"blocks", report.blocks},
          {"attention", report.attention},
          {"similarity", report.similarity},
          {"head", report.head},
          {"total", report.total},
          {"gmacs", static_cast<double>(report.total) / 1e9}};
}

}  // namespace autoshot
