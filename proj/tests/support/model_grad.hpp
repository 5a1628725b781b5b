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

#include <functional>
#include <vector>

#include "autoshot/grad_check.hpp"
#include "autoshot/params.hpp"

namespace autoshot::testing {

using ContextLoss = std::function<nn::Var(ForwardContext&, const std::vector<nn::Var>& inputs)>;

/// Gradient check over free `inputs` plus model tensors reached through
/// ForwardContext::bind. Each model tensor is replaced by the checker's leaf.
inline nn::GradCheckReport grad_check_model(const std::vector<nn::Tensor*>& model_tensors, const std::vector<nn::Tensor>& inputs,
                                            const ContextLoss& loss, nn::Phase phase = nn::Phase::kTrain,
                                            double eps = 1e-6) {
  std::vector<nn::Tensor> params = inputs;
  for (const nn::Tensor* t : model_tensors) params.push_back(*t);
  return nn::grad_check(
      params,
      [&](nn::Graph& g, const std::vector<nn::Var>& v) {
        ForwardContext ctx(g, phase);
        for (std::size_t i = 0; i < model_tensors.size(); ++i) ctx.substitutes[model_tensors[i]] = v[inputs.size() + i];
        return loss(ctx, std::vector<nn::Var>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(inputs.size())));
      },
      eps);
}

/// Pointers to the tensors of a named list.
inline std::vector<nn::Tensor*> tensors_of(const std::vector<NamedTensor>& named) {
  std::vector<nn::Tensor*> out;
  for (const auto& n : named) out.push_back(n.tensor);
  return out;
}

}  // namespace autoshot::testing
