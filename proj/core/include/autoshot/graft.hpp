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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "autoshot/network.hpp"
#include "autoshot/sampling.hpp"
#include "autoshot/trainer.hpp"

namespace autoshot::train {

struct GraftConfig {
  double A = 0.4;
  double c = 1.0;
  std::size_t bins = 10;
  std::size_t networks = 3;
};

void validate(const GraftConfig& cfg);

/// Entropy (natural log) of the histogram of `weights` over [min, max] with
/// `bins` equal-width bins. All-equal weights give 0.
double layer_entropy(std::span<const double> weights, std::size_t bins = 10);

/// clamp(A * atan(c * (h_receiver - h_donor)) + 0.5, 0, 1).
double graft_coefficient(double h_donor, double h_receiver, double A = 0.4, double c = 1.0);

struct GraftRecord {
  std::string layer;
  std::size_t receiver = 0;
  std::size_t donor = 0;
  double alpha = 0.0;
};

/// One grafting round over models of one architecture arranged in a ring:
/// model i receives from model i-1 (model 0 from the last). Every trainable
/// tensor is a layer: W_i = alpha * W_i + (1 - alpha) * W_{i-1}, with alpha
/// from the pre-round entropies. Batch-norm running statistics follow the
/// alpha of their gamma. `alpha_override` replaces the computed alpha.
std::vector<GraftRecord> graft_networks(const std::vector<Model*>& models, const GraftConfig& cfg,
                                        std::optional<double> alpha_override = std::nullopt);

struct GraftEnsembleResult {
  std::vector<Model> models;
  std::vector<std::vector<double>> epoch_loss;  ///< [model][epoch]
  std::vector<GraftRecord> last_round;
};

/// Trains cfg.networks copies of `code` (seeds train.seed + i), optionally
/// distilling from `teacher`, and grafts them in a ring after every epoch.
GraftEnsembleResult train_graft_ensemble(const arch::ArchCode& code, const NetworkConfig& net, const ShotPool& pool,
                                         const TrainConfig& train, const GraftConfig& graft, Model* teacher = nullptr,
                                         const StepLogger& log = {});

}  // namespace autoshot::train
