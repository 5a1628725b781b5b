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

#include "autoshot/graph.hpp"
#include "autoshot/tensor.hpp"

namespace autoshot::nn {

/// Builds a scalar loss from leaf variables bound to `params` (in order).
using GraphBuilder = std::function<Var(Graph&, const std::vector<Var>& params)>;

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_param = 0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
};

/// Compares reverse-mode gradients against central differences for every
/// element of every tensor in `params`. The error of one element is
/// |analytic - numeric| / max(1, |analytic|). `eps` must lie in [1e-7, 1e-3].
/// The builder must be deterministic (re-seed any RNG it uses).
GradCheckReport grad_check(std::vector<Tensor> params, const GraphBuilder& build, double eps = 1e-6);

}  // namespace autoshot::nn
