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
#include "autoshot/tensor.hpp"

namespace autoshot {

inline constexpr double kProbabilityClamp = 1e-7;

/// lambda1 * BCE(y_hat, y) + lambda2 * BCE(z_hat, z), each summed over frames
/// and samples. Both classes contribute; probabilities are clamped to
/// [1e-7, 1 - 1e-7].
nn::Var loss_multihead(nn::Var y_hat, nn::Var z_hat, const nn::Tensor& y, const nn::Tensor& z, double lambda1,
                       double lambda2);

/// Same form with the teacher's probabilities as soft targets.
nn::Var distill_loss(nn::Var y_hat, nn::Var z_hat, const nn::Tensor& teacher_y, const nn::Tensor& teacher_z,
                     double lambda1, double lambda2);

}  // namespace autoshot
