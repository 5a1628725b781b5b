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

#include "autoshot/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace autoshot::nn {

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ']';
  return os.str();
}

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

namespace {

void check_positive(const Shape& shape) {
  for (auto d : shape) {
    if (d == 0) throw ShapeError("tensor shape entries must be positive, got " + shape_to_string(shape));
  }
}

}  // namespace

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  check_positive(shape_);
  data_.assign(shape_numel(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
  check_positive(shape_);
  if (data_.size() != shape_numel(shape_)) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) + " does not match shape " +
                     shape_to_string(shape_));
  }
}

Tensor Tensor::randn(Shape shape, std::mt19937_64& rng, double stddev) {
  Tensor t(std::move(shape));
  std::normal_distribution<double> dist(0.0, stddev);
  for (auto& v : t.data_) v = dist(rng);
  return t;
}

Tensor Tensor::uniform(Shape shape, std::mt19937_64& rng, double lo, double hi) {
  Tensor t(std::move(shape));
  std::uniform_real_distribution<double> dist(lo, hi);
  for (auto& v : t.data_) v = dist(rng);
  return t;
}

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= shape_.size()) {
    throw ShapeError("axis " + std::to_string(axis) + " out of range for shape " + shape_to_string(shape_));
  }
  return shape_[axis];
}

std::size_t Tensor::offset(std::initializer_list<std::size_t> index) const {
  if (index.size() != shape_.size()) {
    throw ShapeError("index rank " + std::to_string(index.size()) + " does not match shape " +
                     shape_to_string(shape_));
  }
  std::size_t off = 0;
  std::size_t axis = 0;
  for (auto i : index) {
    if (i >= shape_[axis]) throw std::out_of_range("tensor index out of range");
    off = off * shape_[axis] + i;
    ++axis;
  }
  return off;
}

double& Tensor::at(std::initializer_list<std::size_t> index) { return data_[offset(index)]; }
double Tensor::at(std::initializer_list<std::size_t> index) const { return data_[offset(index)]; }

Tensor Tensor::reshaped(Shape shape) const {
  if (shape_numel(shape) != data_.size()) {
    throw ShapeError("cannot reshape " + shape_to_string(shape_) + " to " + shape_to_string(shape));
  }
  return Tensor(std::move(shape), data_);
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

Tensor& Tensor::operator+=(const Tensor& other) {
  if (shape_ != other.shape_) {
    throw ShapeError("in-place add of " + shape_to_string(other.shape_) + " into " + shape_to_string(shape_));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Tensor& Tensor::operator*=(double scale) {
  for (auto& v : data_) v *= scale;
  return *this;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) {
    throw ShapeError("max_abs_diff of " + shape_to_string(a.shape()) + " and " + shape_to_string(b.shape()));
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace autoshot::nn
