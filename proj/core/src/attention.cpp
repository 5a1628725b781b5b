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

#include "autoshot/attention.hpp"

#include <cmath>

#include "autoshot/ops.hpp"

namespace autoshot::nn {

AttentionResult self_attention_layer(Var x, const AttentionVars& p) {
  const Tensor& xv = x.value();
  if (xv.rank() != 3) throw ShapeError("self_attention_layer: expected [N,T,D], got " + shape_to_string(xv.shape()));
  const std::size_t d = xv.dim(2);
  for (const Var* w : {&p.wq, &p.wk, &p.wv, &p.wo}) {
    if (w->value().shape() != Shape{d, d}) {
      throw ShapeError("self_attention_layer: projection " + shape_to_string(w->value().shape()) +
                       " does not match feature dim of input " + shape_to_string(xv.shape()));
    }
  }
  Var q = linear(x, p.wq, p.bq);
  Var k = linear(x, p.wk, p.bk);
  Var v = linear(x, p.wv, p.bv);
  Var scores = scale(batched_matmul(q, k, /*transpose_b=*/true), 1.0 / std::sqrt(static_cast<double>(d)));
  Var weights = softmax_last(scores);
  Var context = batched_matmul(weights, v);
  Var out = add(x, linear(context, p.wo, p.bo));
  return {out, weights};
}

}  // namespace autoshot::nn
