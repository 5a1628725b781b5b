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

#include "autoshot/blocks.hpp"

#include <cmath>
#include <string>

namespace autoshot {

ConvParams init_spatial_conv(std::size_t cin, std::size_t cout, std::mt19937_64& rng) {
  const double stddev = std::sqrt(2.0 / static_cast<double>(9 * cin));
  return {nn::Tensor::randn({3, 3, cin, cout}, rng, stddev), nn::Tensor::zeros({cout})};
}

ConvParams init_temporal_conv(std::size_t cin, std::size_t cout, std::mt19937_64& rng) {
  const double stddev = std::sqrt(2.0 / static_cast<double>(3 * cin));
  return {nn::Tensor::randn({3, cin, cout}, rng, stddev), nn::Tensor::zeros({cout})};
}

LinearParams init_linear(std::size_t din, std::size_t dout, std::mt19937_64& rng, double gain) {
  const double stddev = std::sqrt(gain / static_cast<double>(din));
  return {nn::Tensor::randn({din, dout}, rng, stddev), nn::Tensor::zeros({dout})};
}

nn::Var ForwardContext::bind(nn::Tensor& t) {
  if (const auto it = substitutes.find(&t); it != substitutes.end()) return it->second;
  nn::Var v = graph.leaf(t, track_grads);
  if (track_grads) bindings.emplace_back(&t, v);
  return v;
}

}  // namespace autoshot

namespace autoshot::arch {

namespace {

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

}  // namespace

BlockShape block_shape(const BlockGene& gene, std::size_t filters, std::size_t in_channels) {
  validate(gene);
  if (filters == 0 || in_channels == 0) throw ArchError("block_shape: F and input channels must be positive");
  BlockShape s;
  s.kind = gene.kind;
  s.in_channels = in_channels;
  s.branches = static_cast<std::size_t>(gene.branches);
  s.temporal_out = ceil_div(4 * filters, s.branches);
  s.out_channels = s.branches * s.temporal_out;
  const std::size_t nc = static_cast<std::size_t>(gene.channel_multiple) * filters;
  switch (gene.kind) {
    case BlockKind::kV2:
      s.spatial_convs = s.branches;
      s.spatial_out = ceil_div(nc, s.branches);
      s.temporal_in = s.spatial_out;
      break;
    case BlockKind::kV2A:
      s.spatial_convs = 1;
      s.spatial_out = nc;
      s.temporal_in = nc;
      break;
    case BlockKind::kV2B:
      s.spatial_convs = 1;
      s.spatial_out = s.out_channels;
      s.temporal_in = in_channels;
      break;
    case BlockKind::kV2C:
      s.spatial_convs = 1;
      s.spatial_out = s.out_channels;
      s.temporal_in = s.spatial_out;
      break;
  }
  validate(s);
  return s;
}

void validate(const BlockShape& s) {
  const std::string who = kind_name(s.kind) + " block";
  if (s.in_channels == 0 || s.branches == 0 || s.spatial_convs == 0 || s.spatial_out == 0 || s.temporal_out == 0) {
    throw ArchError(who + ": channel counts must be positive");
  }
  if (s.out_channels != s.branches * s.temporal_out) throw ArchError(who + ": output must equal n_d temporal branches");
  switch (s.kind) {
    case BlockKind::kV2:
      if (s.spatial_convs != s.branches || s.temporal_in != s.spatial_out) throw ArchError(who + ": one spatial conv per branch required");
      break;
    case BlockKind::kV2A:
      if (s.spatial_convs != 1 || s.temporal_in != s.spatial_out) throw ArchError(who + ": a single shared spatial conv required");
      break;
    case BlockKind::kV2B:
      if (s.spatial_convs != 1 || s.temporal_in != s.in_channels || s.spatial_out != s.out_channels) {
        throw ArchError(who + ": spatial width " + std::to_string(s.spatial_out) + " must equal temporal concat width " +
                        std::to_string(s.out_channels));
      }
      break;
    case BlockKind::kV2C:
      if (s.spatial_convs != 1 || s.temporal_in != s.spatial_out || s.spatial_out != s.out_channels) {
        throw ArchError(who + ": spatial width " + std::to_string(s.spatial_out) + " must equal temporal concat width " +
                        std::to_string(s.out_channels));
      }
      break;
  }
}

BlockParams init_block(const BlockShape& shape, std::mt19937_64& rng) {
  validate(shape);
  BlockParams p;
  p.shape = shape;
  for (std::size_t i = 0; i < shape.spatial_convs; ++i) p.spatial.push_back(init_spatial_conv(shape.in_channels, shape.spatial_out, rng));
  for (std::size_t i = 0; i < shape.branches; ++i) p.temporal.push_back(init_temporal_conv(shape.temporal_in, shape.temporal_out, rng));
  p.bn_gamma = nn::Tensor::ones({shape.out_channels});
  p.bn_beta = nn::Tensor::zeros({shape.out_channels});
  p.bn = nn::make_batch_norm_state(shape.out_channels);
  return p;
}

nn::Var block_forward(BlockParams& p, ForwardContext& ctx, nn::Var x) {
  const auto& s = p.shape;
  if (x.value().rank() != 5 || x.value().shape().back() != s.in_channels) {
    throw nn::ShapeError(kind_name(s.kind) + " block expects " + std::to_string(s.in_channels) + " input channels, got " +
                         nn::shape_to_string(x.value().shape()));
  }
  auto spatial = [&](std::size_t i, nn::Var in) {
    return nn::conv2d_spatial(in, ctx.bind(p.spatial[i].weight), ctx.bind(p.spatial[i].bias));
  };
  auto temporal = [&](std::size_t i, nn::Var in) {
    return nn::conv1d_temporal(in, ctx.bind(p.temporal[i].weight), ctx.bind(p.temporal[i].bias), std::size_t{1} << i);
  };

  nn::Var pre;
  std::vector<nn::Var> branches;
  switch (s.kind) {
    case BlockKind::kV2:
      for (std::size_t i = 0; i < s.branches; ++i) branches.push_back(temporal(i, spatial(i, x)));
      pre = nn::concat_channels(branches);
      break;
    case BlockKind::kV2A: {
      nn::Var shared = spatial(0, x);
      for (std::size_t i = 0; i < s.branches; ++i) branches.push_back(temporal(i, shared));
      pre = nn::concat_channels(branches);
      break;
    }
    case BlockKind::kV2B: {
      nn::Var sp = spatial(0, x);
      for (std::size_t i = 0; i < s.branches; ++i) branches.push_back(temporal(i, x));
      pre = nn::add(sp, nn::concat_channels(branches));
      break;
    }
    case BlockKind::kV2C: {
      nn::Var sp = spatial(0, x);
      for (std::size_t i = 0; i < s.branches; ++i) branches.push_back(temporal(i, sp));
      pre = nn::add(sp, nn::concat_channels(branches));
      break;
    }
  }
  nn::Var bn = nn::batch_norm(pre, ctx.bind(p.bn_gamma), ctx.bind(p.bn_beta), p.bn, ctx.phase);
  return nn::relu(bn);
}

void collect_block_tensors(BlockParams& p, const std::string& prefix, std::vector<NamedTensor>& trainable,
                           std::vector<NamedTensor>& buffers) {
  for (std::size_t i = 0; i < p.spatial.size(); ++i) {
    trainable.push_back({prefix + ".spatial" + std::to_string(i) + ".weight", &p.spatial[i].weight});
    trainable.push_back({prefix + ".spatial" + std::to_string(i) + ".bias", &p.spatial[i].bias});
  }
  for (std::size_t i = 0; i < p.temporal.size(); ++i) {
    trainable.push_back({prefix + ".temporal" + std::to_string(i) + ".weight", &p.temporal[i].weight});
    trainable.push_back({prefix + ".temporal" + std::to_string(i) + ".bias", &p.temporal[i].bias});
  }
  trainable.push_back({prefix + ".bn.gamma", &p.bn_gamma});
  trainable.push_back({prefix + ".bn.beta", &p.bn_beta});
  buffers.push_back({prefix + ".bn.running_mean", &p.bn.running_mean});
  buffers.push_back({prefix + ".bn.running_var", &p.bn.running_var});
}

}  // namespace autoshot::arch
