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

#include "autoshot/network.hpp"

#include <stdexcept>
#include <string>

#include "autoshot/attention.hpp"
#include "autoshot/ops.hpp"
#include "autoshot/similarity.hpp"

namespace autoshot {

using arch::kSearchBlocks;
using nn::Var;

void validate(const NetworkConfig& cfg) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("network config: " + what);
  };
  require(cfg.height > 0 && cfg.width > 0 && cfg.channels > 0 && cfg.frames > 0, "input sizes must be positive");
  for (std::size_t f : cfg.filters) require(f > 0, "filters must be positive");
  require(cfg.similarity_projection > 0 && cfg.similarity_features > 0 && cfg.histogram_features > 0,
          "similarity sizes must be positive");
  require(!cfg.similarity_offsets.empty(), "similarity offsets must not be empty");
  for (int o : cfg.similarity_offsets) require(o != 0, "similarity offsets must be non-zero");
  require(cfg.hidden > 0, "hidden size must be positive");
  require(cfg.dropout >= 0.0 && cfg.dropout < 1.0, "dropout must lie in [0, 1)");
  std::size_t h = cfg.height, w = cfg.width;
  for (std::size_t i = 0; i < kSearchBlocks; ++i) {
    if (!cfg.pool_after[i]) continue;
    require(h >= 2 && w >= 2, "pooling after block " + std::to_string(i + 1) + " needs at least 2x2 features, got " +
                                  std::to_string(h) + "x" + std::to_string(w));
    h /= 2;
    w /= 2;
  }
}

nlohmann::json to_json(const NetworkConfig& cfg) {
  return {{"height", cfg.height},
          {"width", cfg.width},
          {"channels", cfg.channels},
          {"frames", cfg.frames},
          {"filters", cfg.filters},
          {"pool_after", cfg.pool_after},
          {"similarity_projection", cfg.similarity_projection},
          {"similarity_features", cfg.similarity_features},
          {"histogram_features", cfg.histogram_features},
          {"similarity_offsets", cfg.similarity_offsets},
          {"hidden", cfg.hidden},
          {"dropout", cfg.dropout},
          {"output_bias", cfg.output_bias}};
}

NetworkConfig network_config_from_json(const nlohmann::json& j) {
  NetworkConfig cfg;
  j.at("height").get_to(cfg.height);
  j.at("width").get_to(cfg.width);
  j.at("channels").get_to(cfg.channels);
  j.at("frames").get_to(cfg.frames);
  j.at("filters").get_to(cfg.filters);
  j.at("pool_after").get_to(cfg.pool_after);
  j.at("similarity_projection").get_to(cfg.similarity_projection);
  j.at("similarity_features").get_to(cfg.similarity_features);
  j.at("histogram_features").get_to(cfg.histogram_features);
  j.at("similarity_offsets").get_to(cfg.similarity_offsets);
  j.at("hidden").get_to(cfg.hidden);
  j.at("dropout").get_to(cfg.dropout);
  j.at("output_bias").get_to(cfg.output_bias);
  validate(cfg);
  return cfg;
}

std::array<SpatialSize, kSearchBlocks> block_output_sizes(const NetworkConfig& cfg) {
  validate(cfg);
  std::array<SpatialSize, kSearchBlocks> sizes{};
  std::size_t h = cfg.height, w = cfg.width;
  for (std::size_t i = 0; i < kSearchBlocks; ++i) {
    sizes[i] = {h, w};
    if (cfg.pool_after[i]) {
      h /= 2;
      w /= 2;
    }
  }
  return sizes;
}

namespace {

SpatialSize final_size(const NetworkConfig& cfg) {
  auto sizes = block_output_sizes(cfg);
  SpatialSize s = sizes.back();
  if (cfg.pool_after.back()) s = {s.height / 2, s.width / 2};
  return s;
}

std::size_t head_input(const NetworkConfig& cfg, std::size_t frame_features) {
  return frame_features + cfg.similarity_features + cfg.histogram_features;
}

}  // namespace

NetworkWidths network_widths(const arch::ArchCode& code, const NetworkConfig& cfg) {
  arch::validate(code);
  validate(cfg);
  NetworkWidths w;
  std::size_t in = cfg.channels;
  for (std::size_t i = 0; i < kSearchBlocks; ++i) {
    const auto shape = arch::block_shape(code.blocks[i], cfg.filters[i], in);
    w.block_in[i] = in;
    w.block_out[i] = shape.out_channels;
    in = shape.out_channels;
  }
  const SpatialSize s = final_size(cfg);
  w.frame_features = in * s.height * s.width;
  w.head_input = head_input(cfg, w.frame_features);
  return w;
}

AttentionParams init_attention(std::size_t dim, std::mt19937_64& rng) {
  AttentionParams p;
  p.query = init_linear(dim, dim, rng, 1.0);
  p.key = init_linear(dim, dim, rng, 1.0);
  p.value = init_linear(dim, dim, rng, 1.0);
  p.output = init_linear(dim, dim, rng, 0.1);
  return p;
}

HeadParams init_head(const NetworkConfig& cfg, std::size_t block_width_sum, std::size_t frame_features,
                     std::mt19937_64& rng) {
  const std::size_t k = cfg.similarity_offsets.size();
  HeadParams h;
  h.similarity_projection = init_linear(block_width_sum, cfg.similarity_projection, rng, 1.0);
  h.similarity_dense = init_linear(k, cfg.similarity_features, rng);
  h.histogram_dense = init_linear(k, cfg.histogram_features, rng);
  h.hidden = init_linear(head_input(cfg, frame_features), cfg.hidden, rng);
  h.single_frame = init_linear(cfg.hidden, 1, rng, 1.0);
  h.all_frames = init_linear(cfg.hidden, 1, rng, 1.0);
  h.single_frame.bias.fill(cfg.output_bias);
  h.all_frames.bias.fill(cfg.output_bias);
  return h;
}

namespace {

void collect_linear(LinearParams& p, const std::string& prefix, std::vector<NamedTensor>& out) {
  out.push_back({prefix + ".weight", &p.weight});
  out.push_back({prefix + ".bias", &p.bias});
}

void collect_attention(AttentionParams& p, const std::string& prefix, std::vector<NamedTensor>& out) {
  collect_linear(p.query, prefix + ".query", out);
  collect_linear(p.key, prefix + ".key", out);
  collect_linear(p.value, prefix + ".value", out);
  collect_linear(p.output, prefix + ".output", out);
}

void collect_head(HeadParams& h, std::vector<NamedTensor>& out) {
  collect_linear(h.similarity_projection, "head.similarity_projection", out);
  collect_linear(h.similarity_dense, "head.similarity_dense", out);
  collect_linear(h.histogram_dense, "head.histogram_dense", out);
  collect_linear(h.hidden, "head.hidden", out);
  collect_linear(h.single_frame, "head.single_frame", out);
  collect_linear(h.all_frames, "head.all_frames", out);
}

Var linear_of(ForwardContext& ctx, LinearParams& p, Var x) { return nn::linear(x, ctx.bind(p.weight), ctx.bind(p.bias)); }

struct TrunkInputs {
  const NetworkConfig* cfg;
  std::array<arch::BlockParams*, kSearchBlocks> blocks;
  std::array<std::size_t, kSearchBlocks> widths;  // features are padded to these widths
  std::vector<AttentionParams>* attention;
  std::size_t attention_layers;
  HeadParams* head;
};

NetworkOutput run_network(const TrunkInputs& in, ForwardContext& ctx, const nn::Tensor& frames) {
  const NetworkConfig& cfg = *in.cfg;
  if (frames.rank() != 5 || frames.dim(2) != cfg.height || frames.dim(3) != cfg.width || frames.dim(4) != cfg.channels) {
    throw nn::ShapeError("network expects [N,T," + std::to_string(cfg.height) + "," + std::to_string(cfg.width) + "," +
                         std::to_string(cfg.channels) + "] frames, got " + nn::shape_to_string(frames.shape()));
  }
  if (ctx.phase == nn::Phase::kTrain && cfg.dropout > 0.0 && ctx.rng == nullptr) {
    throw std::invalid_argument("training forward pass needs a dropout RNG");
  }
  const std::size_t n = frames.dim(0), t = frames.dim(1);
  nn::Graph& g = ctx.graph;

  Var x = g.constant(frames);
  std::vector<Var> pooled_features;
  for (std::size_t i = 0; i < kSearchBlocks; ++i) {
    arch::BlockParams& block = *in.blocks[i];
    if (x.shape().back() < block.shape.in_channels) x = nn::pad_channels(x, block.shape.in_channels);
    Var h = arch::block_forward(block, ctx, x);
    if (h.shape().back() < in.widths[i]) h = nn::pad_channels(h, in.widths[i]);
    pooled_features.push_back(nn::spatial_mean(h));
    x = cfg.pool_after[i] ? nn::avg_pool_spatial(h) : h;
  }

  const auto& xs = x.shape();
  Var frame_features = nn::reshape(x, {n, t, xs[2] * xs[3] * xs[4]});
  for (std::size_t l = 0; l < in.attention_layers; ++l) {
    AttentionParams& a = (*in.attention)[l];
    nn::AttentionVars vars{ctx.bind(a.query.weight),  ctx.bind(a.query.bias), ctx.bind(a.key.weight),
                           ctx.bind(a.key.bias),      ctx.bind(a.value.weight), ctx.bind(a.value.bias),
                           ctx.bind(a.output.weight), ctx.bind(a.output.bias)};
    frame_features = nn::self_attention_layer(frame_features, vars).output;
  }

  HeadParams& head = *in.head;
  Var block_features = nn::concat_channels(pooled_features);
  Var cosine = nn::learnable_cosine_similarity(block_features, ctx.bind(head.similarity_projection.weight),
                                               ctx.bind(head.similarity_projection.bias), cfg.similarity_offsets);
  Var sim = nn::relu(linear_of(ctx, head.similarity_dense, cosine));
  Var hist_in = g.constant(nn::rgb_histogram_similarity(frames, cfg.similarity_offsets));
  Var hist = nn::relu(linear_of(ctx, head.histogram_dense, hist_in));

  Var joined = nn::concat_channels({frame_features, sim, hist});
  Var hidden = nn::relu(linear_of(ctx, head.hidden, joined));
  if (cfg.dropout > 0.0 && ctx.phase == nn::Phase::kTrain) hidden = nn::dropout(hidden, cfg.dropout, ctx.phase, *ctx.rng);

  NetworkOutput out;
  out.single_frame = nn::reshape(nn::sigmoid(linear_of(ctx, head.single_frame, hidden)), {n, t});
  out.all_frames = nn::reshape(nn::sigmoid(linear_of(ctx, head.all_frames, hidden)), {n, t});
  return out;
}

}  // namespace

// -- Model ----------------------------------------------------------------------

Model build_network(const arch::ArchCode& code, const NetworkConfig& cfg, std::uint64_t seed) {
  const NetworkWidths widths = network_widths(code, cfg);
  std::mt19937_64 rng(seed);
  Model m;
  m.config = cfg;
  m.arch = code;
  std::size_t width_sum = 0;
  for (std::size_t i = 0; i < kSearchBlocks; ++i) {
    m.blocks[i] = arch::init_block(arch::block_shape(code.blocks[i], cfg.filters[i], widths.block_in[i]), rng);
    width_sum += widths.block_out[i];
  }
  for (int l = 0; l < code.attention_layers; ++l) m.attention.push_back(init_attention(widths.frame_features, rng));
  m.head = init_head(cfg, width_sum, widths.frame_features, rng);
  return m;
}

std::vector<NamedTensor> Model::parameters() {
  std::vector<NamedTensor> params, unused;
  for (std::size_t i = 0; i < kSearchBlocks; ++i) arch::collect_block_tensors(blocks[i], "block" + std::to_string(i + 1), params, unused);
  for (std::size_t l = 0; l < attention.size(); ++l) collect_attention(attention[l], "attention.layer" + std::to_string(l + 1), params);
  collect_head(head, params);
  return params;
}

std::vector<NamedTensor> Model::buffers() {
  std::vector<NamedTensor> unused, bufs;
  for (std::size_t i = 0; i < kSearchBlocks; ++i) arch::collect_block_tensors(blocks[i], "block" + std::to_string(i + 1), unused, bufs);
  return bufs;
}

std::size_t Model::parameter_count() {
  std::size_t total = 0;
  for (const auto& p : parameters()) total += p.tensor->size();
  return total;
}

NetworkOutput forward(Model& model, ForwardContext& ctx, const nn::Tensor& frames) {
  TrunkInputs in;
  in.cfg = &model.config;
  for (std::size_t i = 0; i < kSearchBlocks; ++i) {
    in.blocks[i] = &model.blocks[i];
    in.widths[i] = model.blocks[i].shape.out_channels;
  }
  in.attention = &model.attention;
  in.attention_layers = model.attention.size();
  in.head = &model.head;
  return run_network(in, ctx, frames);
}

// -- SuperNet -------------------------------------------------------------------

SuperNet build_supernet(const NetworkConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  std::mt19937_64 rng(seed);
  SuperNet net;
  net.config = cfg;
  const auto genes = arch::enumerate_block_genes();
  std::size_t in = cfg.channels;
  std::size_t width_sum = 0;
  for (std::size_t p = 0; p < kSearchBlocks; ++p) {
    std::size_t widest = 0;
    for (std::size_t o = 0; o < arch::kOptionsPerBlock; ++o) {
      net.blocks[p][o] = arch::init_block(arch::block_shape(genes[o], cfg.filters[p], in), rng);
      widest = std::max(widest, net.blocks[p][o].shape.out_channels);
    }
    net.widths[p] = widest;
    width_sum += widest;
    in = widest;
  }
  const SpatialSize s = final_size(cfg);
  const std::size_t frame_features = in * s.height * s.width;
  for (std::size_t depth = 1; depth < arch::kAttentionOptions; ++depth) {
    std::vector<AttentionParams> layers;
    for (std::size_t l = 0; l < depth; ++l) layers.push_back(init_attention(frame_features, rng));
    net.attention.push_back(std::move(layers));
  }
  net.head = init_head(cfg, width_sum, frame_features, rng);
  return net;
}

namespace {

std::string option_prefix(std::size_t p, std::size_t o) {
  return "block" + std::to_string(p + 1) + ".option" + std::to_string(o);
}

}  // namespace

std::vector<NamedTensor> SuperNet::parameters() {
  std::vector<NamedTensor> params, unused;
  for (std::size_t p = 0; p < kSearchBlocks; ++p) {
    for (std::size_t o = 0; o < arch::kOptionsPerBlock; ++o) arch::collect_block_tensors(blocks[p][o], option_prefix(p, o), params, unused);
  }
  for (std::size_t d = 0; d < attention.size(); ++d) {
    for (std::size_t l = 0; l < attention[d].size(); ++l) {
      collect_attention(attention[d][l], "attention.depth" + std::to_string(d + 1) + ".layer" + std::to_string(l + 1), params);
    }
  }
  collect_head(head, params);
  return params;
}

std::vector<NamedTensor> SuperNet::buffers() {
  std::vector<NamedTensor> unused, bufs;
  for (std::size_t p = 0; p < kSearchBlocks; ++p) {
    for (std::size_t o = 0; o < arch::kOptionsPerBlock; ++o) arch::collect_block_tensors(blocks[p][o], option_prefix(p, o), unused, bufs);
  }
  return bufs;
}

std::vector<NamedTensor> SuperNet::path_parameters(const arch::ArchCode& code) {
  arch::validate(code);
  const auto genes = code.genes();
  std::vector<NamedTensor> params, unused;
  for (std::size_t p = 0; p < kSearchBlocks; ++p) arch::collect_block_tensors(blocks[p][genes[p]], option_prefix(p, genes[p]), params, unused);
  if (code.attention_layers > 0) {
    auto& layers = attention[static_cast<std::size_t>(code.attention_layers) - 1];
    for (std::size_t l = 0; l < layers.size(); ++l) {
      collect_attention(layers[l], "attention.depth" + std::to_string(code.attention_layers) + ".layer" + std::to_string(l + 1), params);
    }
  }
  collect_head(head, params);
  return params;
}

NetworkOutput forward(SuperNet& net, const arch::ArchCode& path, ForwardContext& ctx, const nn::Tensor& frames) {
  arch::validate(path);
  const auto genes = path.genes();
  TrunkInputs in;
  in.cfg = &net.config;
  for (std::size_t p = 0; p < kSearchBlocks; ++p) in.blocks[p] = &net.blocks[p][genes[p]];
  in.widths = net.widths;
  in.attention_layers = static_cast<std::size_t>(path.attention_layers);
  in.attention = path.attention_layers > 0 ? &net.attention[in.attention_layers - 1] : nullptr;
  in.head = &net.head;
  return run_network(in, ctx, frames);
}

}  // namespace autoshot
