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

#include "autoshot/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace autoshot::nn {

namespace {

double evaluate(const std::vector<Tensor>& params, const GraphBuilder& build) {
  Graph g;
  std::vector<Var> leaves;
  leaves.reserve(params.size());
  for (const auto& p : params) leaves.push_back(g.leaf(p, false));
  Var loss = build(g, leaves);
  if (loss.value().size() != 1) throw ShapeError("grad_check: builder must return a scalar");
  return loss.value()[0];
}

}  // namespace

GradCheckReport grad_check(std::vector<Tensor> params, const GraphBuilder& build, double eps) {
  if (eps < 1e-7 || eps > 1e-3) throw std::invalid_argument("grad_check: eps must be in [1e-7, 1e-3]");

  std::vector<Tensor> analytic;
  {
    Graph g;
    std::vector<Var> leaves;
    for (const auto& p : params) leaves.push_back(g.leaf(p, true));
    Var loss = build(g, leaves);
    g.backward(loss);
    for (const auto& l : leaves) {
      const Tensor& gr = l.grad();
      analytic.push_back(gr.empty() ? Tensor::zeros(l.value().shape()) : gr);
    }
  }

  GradCheckReport report;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    for (std::size_t i = 0; i < params[pi].size(); ++i) {
      const double orig = params[pi][i];
      params[pi][i] = orig + eps;
      const double up = evaluate(params, build);
      params[pi][i] = orig - eps;
      const double down = evaluate(params, build);
      params[pi][i] = orig;
      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[pi][i];
      const double err = std::abs(a - numeric) / std::max(1.0, std::abs(a));
      ++report.checked;
      if (err > report.max_rel_error) {
        report.max_rel_error = err;
        report.worst_param = pi;
        report.worst_index = i;
      }
    }
  }
  return report;
}

}  // namespace autoshot::nn
