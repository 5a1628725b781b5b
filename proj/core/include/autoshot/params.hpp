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
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "autoshot/graph.hpp"
#include "autoshot/ops.hpp"
#include "autoshot/tensor.hpp"

namespace autoshot {

/// A named view of a tensor owned by a model.
struct NamedTensor {
  std::string name;
  nn::Tensor* tensor = nullptr;
};

struct ConvParams {
  nn::Tensor weight;
  nn::Tensor bias;
};

struct LinearParams {
  nn::Tensor weight;  ///< [Din, Dout]
  nn::Tensor bias;    ///< [Dout]
};

ConvParams init_spatial_conv(std::size_t cin, std::size_t cout, std::mt19937_64& rng);
ConvParams init_temporal_conv(std::size_t cin, std::size_t cout, std::mt19937_64& rng);
LinearParams init_linear(std::size_t din, std::size_t dout, std::mt19937_64& rng, double gain = 2.0);

/// Per-pass state: the graph being built, the layer phase and the trainable
/// leaves created for model tensors (so an optimizer can map gradients back).
struct ForwardContext {
  ForwardContext(nn::Graph& g, nn::Phase p, std::mt19937_64* dropout_rng = nullptr, bool grads = false)
      : graph(g), phase(p), rng(dropout_rng), track_grads(grads) {}

  nn::Graph& graph;
  nn::Phase phase;
  std::mt19937_64* rng;
  bool track_grads;
  std::vector<std::pair<nn::Tensor*, nn::Var>> bindings;

  /// Variables to use in place of specific model tensors (gradient checks
  /// feed perturbed leaves through this).
  std::unordered_map<const nn::Tensor*, nn::Var> substitutes;
  /// Creates a leaf holding a copy of `t` (or returns its substitute); records
  /// the binding when gradients are tracked.
  nn::Var bind(nn::Tensor& t);
};

}  // namespace autoshot
