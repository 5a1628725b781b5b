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
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "autoshot/tensor.hpp"

namespace autoshot::nn {

class Graph;

/// Handle to a node of a Graph. Cheap to copy; valid as long as its Graph.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Tensor& grad() const;
  const Shape& shape() const { return value().shape(); }
  bool requires_grad() const;
  bool valid() const noexcept { return graph_ != nullptr; }
  Graph& graph() const { return *graph_; }
  std::size_t id() const noexcept { return id_; }

 private:
  friend class Graph;
  Var(Graph* graph, std::size_t id) : graph_(graph), id_(id) {}

  Graph* graph_ = nullptr;
  std::size_t id_ = 0;
};

/// Append-only tape of primitive applications. Nodes are stored in creation
/// order, so every node's inputs precede it and reverse iteration is a valid
/// backprop schedule. A Graph must stay on one thread.
class Graph {
 public:
  using BackwardFn = std::function<void(const Tensor& out_grad)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var leaf(Tensor value, bool requires_grad = false);
  Var constant(Tensor value) { return leaf(std::move(value), false); }

  /// Appends the result of a primitive. The node requires grad iff any input
  /// does; `backward` is dropped otherwise.
  Var record(std::string op, Tensor value, const std::vector<Var>& inputs, BackwardFn backward);

  /// Reverse sweep from a scalar node. Clears all previously stored grads.
  void backward(Var loss);

  /// Gradient buffer of `v`, zero-initialized on first access.
  Tensor& grad_ref(Var v);

  const Tensor& value(std::size_t id) const { return nodes_.at(id).value; }
  const Tensor& grad(std::size_t id) const;
  bool requires_grad(std::size_t id) const { return nodes_.at(id).requires_grad; }
  const std::string& op(std::size_t id) const { return nodes_.at(id).op; }
  const std::vector<std::size_t>& inputs(std::size_t id) const { return nodes_.at(id).inputs; }
  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    std::string op;
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
  };

  // deque keeps references returned by value() stable while nodes are appended.
  std::deque<Node> nodes_;
  Tensor empty_;
};

}  // namespace autoshot::nn
