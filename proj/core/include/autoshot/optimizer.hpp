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

#include <unordered_map>
#include <utility>
#include <vector>

#include "autoshot/graph.hpp"
#include "autoshot/tensor.hpp"

namespace autoshot::train {

/// SGD with heavy-ball momentum: v = mu * v + g; w -= lr * v. Only tensors
/// that took part in the pass (their bindings) are touched, velocity included.
class Sgd {
 public:
  Sgd(double lr, double momentum, double clip_norm = 0.0);

  /// Applies one step using the gradients of `bindings` scaled by
  /// `grad_scale`. A tensor bound more than once gets the summed gradient.
  /// Returns the gradient norm before clipping.
  double step(const std::vector<std::pair<nn::Tensor*, nn::Var>>& bindings, double grad_scale = 1.0);

  double learning_rate() const noexcept { return lr_; }
  void set_learning_rate(double lr) noexcept { lr_ = lr; }

 private:
  double lr_;
  double momentum_;
  double clip_norm_;
  std::unordered_map<const nn::Tensor*, nn::Tensor> velocity_;
};

}  // namespace autoshot::train
