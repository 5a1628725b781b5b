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

#include "autoshot/trainer.hpp"

#include <cmath>

#include "autoshot/losses.hpp"

namespace autoshot::train {

void validate(const TrainConfig& cfg) {
  if (!(cfg.lambda1 > 0.0 && cfg.lambda2 > 0.0)) throw std::invalid_argument("train config: lambda1 and lambda2 must be positive");
  if (!(cfg.lr > 0.0)) throw std::invalid_argument("train config: learning rate must be positive");
  if (cfg.batch == 0 || cfg.probe_batch == 0) throw std::invalid_argument("train config: batch sizes must be positive");
  if (cfg.sample.frames < 4) throw std::invalid_argument("train config: N_F must be at least 4");
}

namespace {

constexpr std::uint64_t kProbeStream = 0x9e3779b97f4a7c15ULL;

double frame_count(const Batch& b) { return static_cast<double>(b.y.size()); }

void check_finite(double loss, std::size_t step, const std::string& path) {
  if (!std::isfinite(loss)) {
    throw TrainingDiverged("training diverged at step " + std::to_string(step) + " (loss " + std::to_string(loss) +
                           (path.empty() ? "" : ", path " + path) + "); lower the learning rate or enable clipping");
  }
}

template <typename Forward>
double eval_loss(Forward&& forward, const Batch& batch, const TrainConfig& cfg) {
  nn::Graph g;
  ForwardContext ctx(g, nn::Phase::kEvalBatchStats);
  NetworkOutput out = forward(ctx, batch.frames);
  nn::Var loss = loss_multihead(out.single_frame, out.all_frames, batch.y, batch.z, cfg.lambda1, cfg.lambda2);
  return loss.value()[0] / frame_count(batch);
}

}  // namespace

Batch make_probe_batch(const ShotPool& pool, const TrainConfig& cfg) {
  std::mt19937_64 rng(cfg.seed ^ kProbeStream);
  return make_batch(pool, rng, cfg.sample, cfg.probe_batch);
}

double probe_loss(Model& model, const Batch& batch, const TrainConfig& cfg) {
  return eval_loss([&](ForwardContext& ctx, const nn::Tensor& x) { return forward(model, ctx, x); }, batch, cfg);
}

double probe_loss(SuperNet& net, const arch::ArchCode& path, const Batch& batch, const TrainConfig& cfg) {
  return eval_loss([&](ForwardContext& ctx, const nn::Tensor& x) { return forward(net, path, ctx, x); }, batch, cfg);
}

TrainStats train_supernet(SuperNet& net, const ShotPool& pool, const TrainConfig& cfg, const StepLogger& log) {
  validate(cfg);
  TrainStats stats;
  std::mt19937_64 rng(cfg.seed);
  std::mt19937_64 probe_rng(cfg.seed ^ kProbeStream);
  const arch::ArchCode probe_path = sample_uniform_path(probe_rng);
  const Batch probe = make_probe_batch(pool, cfg);
  stats.probe_initial = probe_loss(net, probe_path, probe, cfg);

  Sgd opt(cfg.lr, cfg.momentum, cfg.clip_norm);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double total = 0.0;
    for (std::size_t s = 0; s < cfg.steps_per_epoch; ++s) {
      const arch::ArchCode path = sample_uniform_path(rng);
      const Batch batch = make_batch(pool, rng, cfg.sample, cfg.batch);
      nn::Graph g;
      ForwardContext ctx(g, nn::Phase::kTrain, &rng, true);
      NetworkOutput out = forward(net, path, ctx, batch.frames);
      nn::Var loss = loss_multihead(out.single_frame, out.all_frames, batch.y, batch.z, cfg.lambda1, cfg.lambda2);
      const double scale = 1.0 / frame_count(batch);
      const double value = loss.value()[0] * scale;
      const std::string text = arch::to_text(path);
      check_finite(value, stats.steps, text);
      g.backward(loss);
      opt.step(ctx.bindings, scale);
      total += value;
      if (log) log({stats.steps, value, cfg.lr, text});
      ++stats.steps;
    }
    stats.epoch_loss.push_back(cfg.steps_per_epoch == 0 ? 0.0 : total / static_cast<double>(cfg.steps_per_epoch));
  }
  stats.probe_final = probe_loss(net, probe_path, probe, cfg);
  return stats;
}

ModelTrainer::ModelTrainer(Model& model, const ShotPool& pool, const TrainConfig& cfg, Model* teacher, StepLogger log)
    : model_(model),
      pool_(pool),
      cfg_(cfg),
      teacher_(teacher),
      log_(std::move(log)),
      opt_(cfg.lr, cfg.momentum, cfg.clip_norm),
      rng_(cfg.seed) {
  validate(cfg_);
  if (teacher_ != nullptr && teacher_->config != model_.config) {
    throw std::invalid_argument("distillation teacher must share the network config");
  }
  probe_ = make_probe_batch(pool_, cfg_);
}

double ModelTrainer::probe() const { return probe_loss(model_, probe_, cfg_); }

double ModelTrainer::run_epoch() {
  const std::string text = arch::to_text(model_.arch);
  double total = 0.0;
  for (std::size_t s = 0; s < cfg_.steps_per_epoch; ++s) {
    const Batch batch = make_batch(pool_, rng_, cfg_.sample, cfg_.batch);
    nn::Tensor teacher_y, teacher_z;
    if (teacher_ != nullptr) {
      nn::Graph tg;
      ForwardContext tctx(tg, nn::Phase::kEval);
      NetworkOutput t = forward(*teacher_, tctx, batch.frames);
      teacher_y = t.single_frame.value();
      teacher_z = t.all_frames.value();
    }
    nn::Graph g;
    ForwardContext ctx(g, nn::Phase::kTrain, &rng_, true);
    NetworkOutput out = forward(model_, ctx, batch.frames);
    nn::Var loss = loss_multihead(out.single_frame, out.all_frames, batch.y, batch.z, cfg_.lambda1, cfg_.lambda2);
    if (teacher_ != nullptr) {
      loss = nn::add(loss, distill_loss(out.single_frame, out.all_frames, teacher_y, teacher_z, cfg_.lambda1, cfg_.lambda2));
    }
    const double scale = 1.0 / frame_count(batch);
    const double value = loss.value()[0] * scale;
    check_finite(value, step_, text);
    g.backward(loss);
    opt_.step(ctx.bindings, scale);
    total += value;
    if (log_) log_({step_, value, cfg_.lr, text});
    ++step_;
  }
  return cfg_.steps_per_epoch == 0 ? 0.0 : total / static_cast<double>(cfg_.steps_per_epoch);
}

TrainStats ModelTrainer::run() {
  TrainStats stats;
  stats.probe_initial = probe();
  for (std::size_t e = 0; e < cfg_.epochs; ++e) stats.epoch_loss.push_back(run_epoch());
  stats.probe_final = probe();
  stats.steps = step_;
  return stats;
}

Model retrain_candidate(const arch::ArchCode& code, const NetworkConfig& net, const ShotPool& pool, const TrainConfig& cfg,
                        TrainStats* stats, const StepLogger& log) {
  Model model = build_network(code, net, cfg.seed);
  ModelTrainer trainer(model, pool, cfg, nullptr, log);
  TrainStats s = trainer.run();
  if (stats != nullptr) *stats = s;
  return model;
}

}  // namespace autoshot::train
