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

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "autoshot/network.hpp"
#include "autoshot/optimizer.hpp"
#include "autoshot/sampling.hpp"

namespace autoshot::train {

struct TrainConfig {
  double lr = 0.1;
  double momentum = 0.9;
  std::size_t batch = 16;
  std::size_t epochs = 12;
  std::size_t steps_per_epoch = 50;
  double lambda1 = 5.0;
  double lambda2 = 0.1;
  double clip_norm = 0.0;  ///< 0 disables clipping
  std::uint64_t seed = 0;
  SampleConfig sample;
  std::size_t probe_batch = 8;
};

void validate(const TrainConfig& cfg);

/// One optimizer step. `loss` is the per-frame mean of the multi-head loss.
struct StepRecord {
  std::size_t step = 0;
  double loss = 0.0;
  double lr = 0.0;
  std::string path;
};

using StepLogger = std::function<void(const StepRecord&)>;

struct TrainStats {
  std::vector<double> epoch_loss;  ///< mean training loss per epoch
  double probe_initial = 0.0;
  double probe_final = 0.0;
  std::size_t steps = 0;
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mean per-frame loss of `model`-like forward on a fixed batch without
/// dropout, using batch statistics for normalization.
double probe_loss(Model& model, const Batch& batch, const TrainConfig& cfg);
double probe_loss(SuperNet& net, const arch::ArchCode& path, const Batch& batch, const TrainConfig& cfg);

/// The batch used to track training progress; depends only on the seed.
Batch make_probe_batch(const ShotPool& pool, const TrainConfig& cfg);

/// Single-path training: each step samples a fresh path uniformly and updates
/// only the weights on it. The probe uses a fixed path drawn from the seed.
TrainStats train_supernet(SuperNet& net, const ShotPool& pool, const TrainConfig& cfg, const StepLogger& log = {});

/// Trains one architecture with the multi-head loss; with a teacher the soft
/// targets of its predictions are added as a distillation term.
class ModelTrainer {
 public:
  ModelTrainer(Model& model, const ShotPool& pool, const TrainConfig& cfg, Model* teacher = nullptr,
               StepLogger log = {});

  /// Runs cfg.steps_per_epoch steps and returns their mean loss.
  double run_epoch();
  TrainStats run();

  double probe() const;
  std::size_t steps() const noexcept { return step_; }

 private:
  Model& model_;
  const ShotPool& pool_;
  TrainConfig cfg_;
  Model* teacher_;
  StepLogger log_;
  Sgd opt_;
  std::mt19937_64 rng_;
  Batch probe_;
  std::size_t step_ = 0;
};

/// Fresh initialization from cfg.seed followed by cfg.epochs of training.
Model retrain_candidate(const arch::ArchCode& code, const NetworkConfig& net, const ShotPool& pool, const TrainConfig& cfg,
                        TrainStats* stats = nullptr, const StepLogger& log = {});

}  // namespace autoshot::train
