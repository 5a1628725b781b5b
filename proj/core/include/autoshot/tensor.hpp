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
#include <initializer_list>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace autoshot::nn {

using Shape = std::vector<std::size_t>;

std::string shape_to_string(const Shape& shape);
std::size_t shape_numel(const Shape& shape);

/// Thrown when operand shapes violate an op's contract. The message names
/// the op and every offending shape.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense row-major float64 array. Video activations use [N, T, H, W, C].
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape), 0.0); }
  static Tensor ones(Shape shape) { return Tensor(std::move(shape), 1.0); }
  static Tensor randn(Shape shape, std::mt19937_64& rng, double stddev = 1.0);
  static Tensor uniform(Shape shape, std::mt19937_64& rng, double lo, double hi);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::vector<double>& storage() noexcept { return data_; }
  const std::vector<double>& storage() const noexcept { return data_; }

  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  /// Multi-index access; bounds are checked.
  double& at(std::initializer_list<std::size_t> index);
  double at(std::initializer_list<std::size_t> index) const;

  /// Same data, new shape with equal element count.
  Tensor reshaped(Shape shape) const;

  void fill(double value);
  Tensor& operator+=(const Tensor& other);
  Tensor& operator*=(double scale);

  bool same_shape(const Tensor& other) const noexcept { return shape_ == other.shape_; }

 private:
  std::size_t offset(std::initializer_list<std::size_t> index) const;

  Shape shape_;
  std::vector<double> data_;
};

double max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace autoshot::nn
