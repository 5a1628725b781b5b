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

#include "autoshot/arch.hpp"
#include "autoshot/params.hpp"

namespace autoshot::arch {

/// Channel bookkeeping of one block instance.
struct BlockShape {
  BlockKind kind = BlockKind::kV2;
  std::size_t in_channels = 0;
  std::size_t branches = 0;       ///< n_d; branch i has dilation 2^i
  std::size_t spatial_convs = 0;  ///< n_d for V2, 1 otherwise
  std::size_t spatial_out = 0;    ///< channels of each spatial conv
  std::size_t temporal_in = 0;
  std::size_t temporal_out = 0;   ///< channels of each temporal branch
  std::size_t out_channels = 0;

  friend bool operator==(const BlockShape&, const BlockShape&) = default;
};

/// Shape of `gene` with base channel unit `filters` (F) reading `in_channels`.
///  V2   spatial ceil(n_c/n_d) per branch, temporal ceil(4F/n_d)
///  V2A  one spatial conv of n_c, temporal ceil(4F/n_d)
///  V2B  spatial n_d*ceil(4F/n_d) on x, temporal branches on x
///  V2C  spatial n_d*ceil(4F/n_d), temporal branches on the spatial output
BlockShape block_shape(const BlockGene& gene, std::size_t filters, std::size_t in_channels);

/// Rejects inconsistent bookkeeping (e.g. a V2B spatial path that cannot be
/// added to the temporal concatenation).
void validate(const BlockShape& shape);

struct BlockParams {
  BlockShape shape;
  std::vector<ConvParams> spatial;
  std::vector<ConvParams> temporal;
  nn::Tensor bn_gamma;
  nn::Tensor bn_beta;
  nn::BatchNormState bn;
};

BlockParams init_block(const BlockShape& shape, std::mt19937_64& rng);

/// h = ReLU(BN(...)) for the block family recorded in `params.shape`.
nn::Var block_forward(BlockParams& params, ForwardContext& ctx, nn::Var x);

void collect_block_tensors(BlockParams& params, const std::string& prefix, std::vector<NamedTensor>& trainable,
                           std::vector<NamedTensor>& buffers);

}  // namespace autoshot::arch
