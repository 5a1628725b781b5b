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

#include "autoshot/optimizer.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace autoshot::train {

Sgd::Sgd(double lr, double momentum, double clip_norm) : lr_(lr), momentum_(momentum), clip_norm_(clip_norm) {
  if (!(lr > 0.0)) throw std::invalid_argument("Sgd: learning rate must be positive");
  if (momentum < 0.0 || momentum >= 1.0) throw std::invalid_argument("Sgd: momentum must lie in [0, 1)");
  if (clip_norm < 0.0) throw std::invalid_argument("Sgd: clip norm must be non-negative");
}

double Sgd::step(const std::vector<std::pair<nn::Tensor*, nn::Var>>& bindings, double grad_scale) {
  // Ordered by first appearance so the update is deterministic.
  std::vector<nn::Tensor*> order;
  std::map<nn::Tensor*, nn::Tensor> grads;
  for (const auto& [tensor, var] : bindings) {
    auto [it, inserted] = grads.try_emplace(tensor, nn::Tensor::zeros(tensor->shape()));
    if (inserted) order.push_back(tensor);
    const nn::Tensor& g = var.grad();
    if (!g.empty()) it->second += g;
  }
  double sq = 0.0;
  for (auto* t : order) {
    auto& g = grads[t];
    g *= grad_scale;
    for (double v : g.data()) sq += v * v;
  }
  const double norm = std::sqrt(sq);
  const double clip = clip_norm_ > 0.0 && norm > clip_norm_ ? clip_norm_ / norm : 1.0;
  for (auto* t : order) {
    auto& g = grads[t];
    auto [vit, fresh] = velocity_.try_emplace(t, nn::Tensor::zeros(t->shape()));
    nn::Tensor& v = vit->second;
    for (std::size_t i = 0; i < t->size(); ++i) {
      v[i] = momentum_ * v[i] + clip * g[i];
      (*t)[i] -= lr_ * v[i];
    }
  }
  return norm;
}

}  // namespace autoshot::train
