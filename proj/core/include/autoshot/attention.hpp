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

#include "autoshot/graph.hpp"

namespace autoshot::nn {

/// Parameters of one single-head self-attention layer over [N,T,D] features.
/// All projections are D x D.
struct AttentionVars {
  Var wq, bq;
  Var wk, bk;
  Var wv, bv;
  Var wo, bo;
};

struct AttentionResult {
  Var output;   ///< [N,T,D]
  Var weights;  ///< [N,T,T], rows sum to one
};

/// out = x + (softmax(Q K^T / sqrt(D)) V) Wo + bo with Q, K, V affine in x.
AttentionResult self_attention_layer(Var x, const AttentionVars& params);

}  // namespace autoshot::nn
