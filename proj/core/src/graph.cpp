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

#include "autoshot/graph.hpp"

namespace autoshot::nn {

const Tensor& Var::value() const { return graph_->value(id_); }
const Tensor& Var::grad() const { return graph_->grad(id_); }
bool Var::requires_grad() const { return graph_->requires_grad(id_); }

Var Graph::leaf(Tensor value, bool requires_grad) {
  Node node;
  node.op = "leaf";
  node.value = std::move(value);
  node.requires_grad = requires_grad;
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Graph::record(std::string op, Tensor value, const std::vector<Var>& inputs, BackwardFn backward) {
  Node node;
  node.op = std::move(op);
  node.value = std::move(value);
  for (const auto& in : inputs) {
    if (in.graph_ != this) throw std::invalid_argument("op '" + node.op + "' mixes variables from different graphs");
    node.inputs.push_back(in.id_);
    node.requires_grad = node.requires_grad || nodes_[in.id_].requires_grad;
  }
  if (node.requires_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

const Tensor& Graph::grad(std::size_t id) const {
  const auto& node = nodes_.at(id);
  return node.grad.empty() ? empty_ : node.grad;
}

Tensor& Graph::grad_ref(Var v) {
  auto& node = nodes_.at(v.id_);
  if (node.grad.empty()) node.grad = Tensor::zeros(node.value.shape());
  return node.grad;
}

void Graph::backward(Var loss) {
  if (loss.graph_ != this) throw std::invalid_argument("backward: loss belongs to a different graph");
  if (nodes_.at(loss.id_).value.size() != 1) {
    throw ShapeError("backward requires a scalar loss, got shape " + shape_to_string(nodes_[loss.id_].value.shape()));
  }
  for (auto& node : nodes_) node.grad = Tensor();
  grad_ref(loss).fill(1.0);
  for (std::size_t i = loss.id_ + 1; i-- > 0;) {
    auto& node = nodes_[i];
    if (!node.backward || node.grad.empty()) continue;
    node.backward(node.grad);
  }
}

}  // namespace autoshot::nn
