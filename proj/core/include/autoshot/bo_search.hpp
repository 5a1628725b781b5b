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

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "autoshot/arch.hpp"
#include "autoshot/gp.hpp"

namespace autoshot::bo {

/// The searched subset of codes: genes marked free vary over their full
/// domain, the others stay at `base`.
struct SearchSpace {
  std::array<bool, arch::kGenes> free{true, true, true, true, true, true, true};
  arch::ArchCode base{};

  static SearchSpace full();
  /// Only the listed genes vary.
  static SearchSpace reduced(const std::vector<std::size_t>& free_genes, const arch::ArchCode& base = {});

  std::uint64_t size() const;
  /// i-th code in mixed-radix order over the free genes.
  arch::ArchCode code_at(std::uint64_t i) const;
  arch::ArchCode sample(std::mt19937_64& rng) const;
  bool contains(const arch::ArchCode& code) const;
};

struct Proposal {
  std::vector<arch::ArchCode> codes;
  std::vector<double> acquisition;
  bool exhausted = false;  ///< fewer unexplored codes than requested
};

/// Without a model (or with an unconditioned one) draws a uniform batch of
/// distinct unexplored codes. Otherwise ranks a candidate pool (every
/// unexplored code when the space has at most `pool_size` codes, else
/// `pool_size` random draws) by acquisition, then posterior variance, then
/// code index, and returns the top `population`.
Proposal propose_batch(const GpModel* model, const SearchSpace& space, std::size_t population, std::mt19937_64& rng,
                       const std::unordered_set<std::uint64_t>& explored, double best_score,
                       std::size_t pool_size = 10000);

enum class Phase { kInit, kBayes };

struct HistoryEntry {
  std::size_t epoch = 0;
  arch::ArchCode arch;
  double score = 0.0;
  double acquisition = 0.0;
  Phase phase = Phase::kInit;
  bool failed = false;
};

nlohmann::json to_json(const HistoryEntry& e);
HistoryEntry history_entry_from_json(const nlohmann::json& j);

struct SearchConfig {
  std::size_t epochs = 100;
  std::size_t init_epochs = 20;
  std::size_t population = 48;
  std::size_t pool_size = 10000;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  GpFitConfig fit;
  KernelParams initial_kernel;
};

/// Scores an architecture in [0, 1]; exceptions and out-of-range scores count
/// as a failed evaluation with score 0.
using EvalFn = std::function<double(const arch::ArchCode&)>;

struct SearchResult {
  arch::ArchCode best;
  double best_score = 0.0;
  std::vector<HistoryEntry> history;
  std::vector<double> best_so_far;  ///< per epoch
  bool exhausted = false;
};

/// Outer loop: init_epochs of uniform exploration, then GP-guided batches.
/// Each epoch uses an RNG derived from (seed, epoch). When `history_path`
/// names an existing file, completed epochs are loaded from it and the run
/// continues after them; new epochs are appended as they finish.
SearchResult search(const EvalFn& eval, const SearchSpace& space, const SearchConfig& cfg,
                    const std::optional<std::filesystem::path>& history_path = std::nullopt,
                    const std::function<void(const std::string&)>& warn = {});

/// 1-based position in `history` at which `target` was first evaluated, or 0.
std::size_t evaluations_to_find(const std::vector<HistoryEntry>& history, const arch::ArchCode& target);

}  // namespace autoshot::bo
