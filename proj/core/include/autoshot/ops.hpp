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

#include "autoshot/graph.hpp"
#include "autoshot/tensor.hpp"

namespace autoshot::nn {

/// How stateful layers behave during a forward pass.
///  kTrain           batch statistics, running stats updated, dropout active
///  kEval            running statistics, dropout off
///  kEvalBatchStats  batch statistics without updating running stats, dropout
///                   off; used to score SuperNet paths whose running stats were
///                   accumulated under other paths
enum class Phase { kTrain, kEval, kEvalBatchStats };

struct BatchNormState {
  Tensor running_mean;
  Tensor running_var;
  double momentum = 0.9;
  double epsilon = 1e-5;
};

BatchNormState make_batch_norm_state(std::size_t channels);

// -- convolution ------------------------------------------------------------

/// 3x3 spatial convolution applied to every frame. x: [N,T,H,W,Cin],
/// w: [3,3,Cin,Cout], b: [Cout]. Zero same-padding.
Var conv2d_spatial(Var x, Var w, Var b);

/// Kernel-3 dilated convolution along T at every pixel. x: [N,T,H,W,Cin],
/// w: [3,Cin,Cout], b: [Cout]. Zero padding of `dilation` frames each side.
Var conv1d_temporal(Var x, Var w, Var b, std::size_t dilation);

// -- normalization / activations ----------------------------------------------

/// Normalizes over every axis except the last (channel) axis.
Var batch_norm(Var x, Var gamma, Var beta, BatchNormState& state, Phase phase);

Var relu(Var x);
Var sigmoid(Var x);
Var dropout(Var x, double rate, Phase phase, std::mt19937_64& rng);

// -- elementwise / structural -------------------------------------------------

Var add(Var x, Var y);
Var scale(Var x, double factor);
Var sum(Var x);
Var reshape(Var x, Shape shape);

/// Concatenates along the last axis; all other axes must agree.
Var concat_channels(const std::vector<Var>& xs);

/// Zero-extends the last axis to `channels`.
Var pad_channels(Var x, std::size_t channels);

/// 2x2 average pooling over H and W of a [N,T,H,W,C] tensor (floor division).
Var avg_pool_spatial(Var x);

/// Mean over H and W: [N,T,H,W,C] -> [N,T,C].
Var spatial_mean(Var x);

// -- dense --------------------------------------------------------------------

/// Affine map over the last axis: x: [..., Din], w: [Din, Dout], b: [Dout].
Var linear(Var x, Var w, Var b);

/// a: [N,M,K] times b: [N,K,P] (or b: [N,P,K] when transpose_b).
Var batched_matmul(Var a, Var b, bool transpose_b = false);

Var softmax_last(Var x);

/// Cosine similarity of each frame vector with the frames at `offsets`
/// (indices clamped to [0, T-1]). f: [N,T,D] -> [N,T,offsets.size()].
/// A zero-norm vector yields similarity 0.
Var window_cosine_similarity(Var f, const std::vector<int>& offsets);

/// weight * sum of per-element binary cross-entropy between probabilities and
/// (possibly soft) targets. Probabilities are clamped to [clamp, 1 - clamp];
/// clamped entries pass no gradient.
Var binary_cross_entropy(Var prob, const Tensor& target, double weight, double clamp = 1e-7);

}  // namespace autoshot::nn
