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

#include "autoshot/graft.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>

namespace autoshot::train {

void validate(const GraftConfig& cfg) {
  if (cfg.bins < 2) throw std::invalid_argument("graft config: bins must be at least 2");
  if (cfg.networks < 2) throw std::invalid_argument("graft config: at least two networks are needed");
  if (!(cfg.A >= 0.0) || !(cfg.c >= 0.0)) throw std::invalid_argument("graft config: A and c must be non-negative");
}

double layer_entropy(std::span<const double> w, std::size_t bins) {
  if (w.empty()) throw std::invalid_argument("layer_entropy: empty layer");
  if (bins < 2) throw std::invalid_argument("layer_entropy: bins must be at least 2");
  const auto [lo_it, hi_it] = std::minmax_element(w.begin(), w.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) return 0.0;
  std::vector<std::size_t> counts(bins, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double v : w) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    ++counts[std::min(b, bins - 1)];
  }
  double h = 0.0;
  const auto n = static_cast<double>(w.size());
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

double graft_coefficient(double h_donor, double h_receiver, double A, double c) {
  return std::clamp(A * std::atan(c * (h_receiver - h_donor)) + 0.5, 0.0, 1.0);
}

namespace {

std::string stat_owner(const std::string& buffer_name) {
  // "<prefix>.running_mean" / "<prefix>.running_var" follow "<prefix>.gamma".
  const auto dot = buffer_name.rfind('.');
  return buffer_name.substr(0, dot) + ".gamma";
}

void blend(nn::Tensor& receiver, const nn::Tensor& donor, double alpha) {
  for (std::size_t i = 0; i < receiver.size(); ++i) receiver[i] = alpha * receiver[i] + (1.0 - alpha) * donor[i];
}

}  // namespace

std::vector<GraftRecord> graft_networks(const std::vector<Model*>& models, const GraftConfig& cfg,
                                        std::optional<double> alpha_override) {
  validate(cfg);
  if (models.size() < 2) throw std::invalid_argument("graft_networks: at least two models are needed");
  if (alpha_override && (*alpha_override < 0.0 || *alpha_override > 1.0)) {
    throw std::invalid_argument("graft_networks: alpha must lie in [0, 1]");
  }
  const std::size_t k = models.size();
  std::vector<std::vector<NamedTensor>> params(k), buffers(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (models[i]->arch != models[0]->arch || models[i]->config != models[0]->config) {
      throw std::invalid_argument("graft_networks: model " + std::to_string(i) + " has a different architecture");
    }
    params[i] = models[i]->parameters();
    buffers[i] = models[i]->buffers();
  }

  // Snapshot everything so each receiver reads its donor's pre-round weights.
  std::vector<std::vector<nn::Tensor>> param_copy(k), buffer_copy(k);
  std::vector<std::vector<double>> entropy(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (const auto& p : params[i]) {
      param_copy[i].push_back(*p.tensor);
      entropy[i].push_back(layer_entropy(p.tensor->data(), cfg.bins));
    }
    for (const auto& b : buffers[i]) buffer_copy[i].push_back(*b.tensor);
  }

  std::vector<GraftRecord> records;
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t d = (r + k - 1) % k;
    std::map<std::string, double> alpha_of;
    for (std::size_t l = 0; l < params[r].size(); ++l) {
      const double alpha = alpha_override ? *alpha_override : graft_coefficient(entropy[d][l], entropy[r][l], cfg.A, cfg.c);
      blend(*params[r][l].tensor, param_copy[d][l], alpha);
      alpha_of[params[r][l].name] = alpha;
      records.push_back({params[r][l].name, r, d, alpha});
    }
    for (std::size_t b = 0; b < buffers[r].size(); ++b) {
      const auto it = alpha_of.find(stat_owner(buffers[r][b].name));
      const double alpha = it != alpha_of.end() ? it->second : 0.5;
      blend(*buffers[r][b].tensor, buffer_copy[d][b], alpha);
    }
  }
  return records;
}

GraftEnsembleResult train_graft_ensemble(const arch::ArchCode& code, const NetworkConfig& net, const ShotPool& pool,
                                         const TrainConfig& train, const GraftConfig& graft, Model* teacher,
                                         const StepLogger& log) {
  validate(graft);
  GraftEnsembleResult result;
  result.models.reserve(graft.networks);
  for (std::size_t i = 0; i < graft.networks; ++i) result.models.push_back(build_network(code, net, train.seed + i));

  std::vector<std::unique_ptr<ModelTrainer>> trainers;
  std::vector<Model*> ring;
  for (std::size_t i = 0; i < graft.networks; ++i) {
    TrainConfig cfg = train;
    cfg.seed = train.seed + i;
    trainers.push_back(std::make_unique<ModelTrainer>(result.models[i], pool, cfg, teacher, log));
    ring.push_back(&result.models[i]);
  }
  result.epoch_loss.resize(graft.networks);
  for (std::size_t e = 0; e < train.epochs; ++e) {
    for (std::size_t i = 0; i < graft.networks; ++i) result.epoch_loss[i].push_back(trainers[i]->run_epoch());
    result.last_round = graft_networks(ring, graft);
  }
  return result;
}

}  // namespace autoshot::train
