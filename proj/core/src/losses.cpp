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

#include "autoshot/losses.hpp"

#include <stdexcept>

#include "autoshot/ops.hpp"

namespace autoshot {

namespace {

void check_targets(const char* who, nn::Var p, const nn::Tensor& t) {
  if (p.shape() != t.shape()) {
    throw nn::ShapeError(std::string(who) + ": prediction " + nn::shape_to_string(p.shape()) + " vs target " +
                         nn::shape_to_string(t.shape()));
  }
}

}  // namespace

nn::Var loss_multihead(nn::Var y_hat, nn::Var z_hat, const nn::Tensor& y, const nn::Tensor& z, double lambda1,
                       double lambda2) {
  if (!(lambda1 > 0.0 && lambda2 > 0.0)) throw std::invalid_argument("loss_multihead: lambda1 and lambda2 must be positive");
  check_targets("loss_multihead", y_hat, y);
  check_targets("loss_multihead", z_hat, z);
  return nn::add(nn::binary_cross_entropy(y_hat, y, lambda1, kProbabilityClamp),
                 nn::binary_cross_entropy(z_hat, z, lambda2, kProbabilityClamp));
}

nn::Var distill_loss(nn::Var y_hat, nn::Var z_hat, const nn::Tensor& teacher_y, const nn::Tensor& teacher_z,
                     double lambda1, double lambda2) {
  for (const nn::Tensor* t : {&teacher_y, &teacher_z}) {
    for (double v : t->data()) {
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("distill_loss: teacher outputs must be probabilities");
    }
  }
  return loss_multihead(y_hat, z_hat, teacher_y, teacher_z, lambda1, lambda2);
}

}  // namespace autoshot
