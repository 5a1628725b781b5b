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
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "autoshot/arch.hpp"
#include "autoshot/blocks.hpp"
#include "autoshot/params.hpp"

namespace autoshot {

/// Layout of the detection network around the six search blocks. Defaults
/// describe the full-size network on 48x27 RGB input with 100-frame windows;
/// with the reference architecture the head input is
/// 256 channels * 3 * 6 pixels + 128 + 128 = 4864.
struct NetworkConfig {
  std::size_t height = 27;
  std::size_t width = 48;
  std::size_t channels = 3;
  std::size_t frames = 100;  ///< window length used for FLOPs counting
  std::array<std::size_t, arch::kSearchBlocks> filters{16, 16, 32, 32, 64, 64};
  /// 2x2 average pooling after the block (one stage = two blocks).
  std::array<bool, arch::kSearchBlocks> pool_after{false, true, false, true, false, true};
  std::size_t similarity_projection = 128;
  std::size_t similarity_features = 128;
  std::size_t histogram_features = 128;
  std::vector<int> similarity_offsets{-2, -1, 1, 2};
  std::size_t hidden = 1024;
  double dropout = 0.5;
  double output_bias = -3.0;

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

/// Throws std::invalid_argument when the pooling schedule collapses the frame
/// or any size is zero.
void validate(const NetworkConfig& cfg);

nlohmann::json to_json(const NetworkConfig& cfg);
NetworkConfig network_config_from_json(const nlohmann::json& j);

/// Spatial size of the features leaving each block.
struct SpatialSize {
  std::size_t height = 0;
  std::size_t width = 0;
};
std::array<SpatialSize, arch::kSearchBlocks> block_output_sizes(const NetworkConfig& cfg);

/// Channel widths of a concrete architecture.
struct NetworkWidths {
  std::array<std::size_t, arch::kSearchBlocks> block_in{};
  std::array<std::size_t, arch::kSearchBlocks> block_out{};
  std::size_t frame_features = 0;  ///< flattened block-6 output per frame
  std::size_t head_input = 0;
};
NetworkWidths network_widths(const arch::ArchCode& code, const NetworkConfig& cfg);

struct AttentionParams {
  LinearParams query, key, value, output;
};

AttentionParams init_attention(std::size_t dim, std::mt19937_64& rng);

/// Similarity features and the two frame-wise classification heads.
struct HeadParams {
  LinearParams similarity_projection;  ///< sum of block widths -> projection
  LinearParams similarity_dense;       ///< K cosine similarities -> features
  LinearParams histogram_dense;        ///< K histogram similarities -> features
  LinearParams hidden;
  LinearParams single_frame;  ///< y-hat: middle frame of a transition
  LinearParams all_frames;    ///< z-hat: every transition frame
};

HeadParams init_head(const NetworkConfig& cfg, std::size_t block_width_sum, std::size_t frame_features,
                     std::mt19937_64& rng);

/// Per-frame probabilities of both heads, each [N,T].
struct NetworkOutput {
  nn::Var single_frame;
  nn::Var all_frames;
};

/// A fixed architecture with its own weights.
struct Model {
  NetworkConfig config;
  arch::ArchCode arch;
  std::array<arch::BlockParams, arch::kSearchBlocks> blocks;
  std::vector<AttentionParams> attention;
  HeadParams head;

  std::vector<NamedTensor> parameters();
  std::vector<NamedTensor> buffers();
  std::size_t parameter_count();
};

/// Builds and He-initializes a model. Throws arch::ArchError for invalid codes
/// and std::invalid_argument for invalid configs.
Model build_network(const arch::ArchCode& code, const NetworkConfig& cfg, std::uint64_t seed);

/// frames: [N,T,H,W,C] with values in [0,1].
NetworkOutput forward(Model& model, ForwardContext& ctx, const nn::Tensor& frames);

/// Weight-sharing network holding every block option. Option inputs are
/// zero-padded to the widest output of the previous position so any path is
/// well-formed.
struct SuperNet {
  NetworkConfig config;
  std::array<std::array<arch::BlockParams, arch::kOptionsPerBlock>, arch::kSearchBlocks> blocks;
  std::array<std::size_t, arch::kSearchBlocks> widths{};  ///< widest output per position
  /// attention[d - 1] holds the d layers used by paths of depth d.
  std::vector<std::vector<AttentionParams>> attention;
  HeadParams head;

  std::vector<NamedTensor> parameters();
  std::vector<NamedTensor> buffers();
  /// Tensors that a path through `code` reads.
  std::vector<NamedTensor> path_parameters(const arch::ArchCode& code);
};

SuperNet build_supernet(const NetworkConfig& cfg, std::uint64_t seed);

NetworkOutput forward(SuperNet& net, const arch::ArchCode& path, ForwardContext& ctx, const nn::Tensor& frames);

}  // namespace autoshot
