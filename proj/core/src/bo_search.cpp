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

#include "autoshot/bo_search.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace autoshot::bo {

namespace {

constexpr std::array<std::size_t, arch::kGenes> kRadix{16, 16, 16, 16, 16, 16, 5};

}  // namespace

SearchSpace SearchSpace::full() { return {}; }

SearchSpace SearchSpace::reduced(const std::vector<std::size_t>& free_genes, const arch::ArchCode& base) {
  SearchSpace s;
  s.free.fill(false);
  for (std::size_t g : free_genes) {
    if (g >= arch::kGenes) throw std::invalid_argument("SearchSpace: gene index " + std::to_string(g) + " out of range");
    s.free[g] = true;
  }
  arch::validate(base);
  s.base = base;
  return s;
}

std::uint64_t SearchSpace::size() const {
  std::uint64_t n = 1;
  for (std::size_t g = 0; g < arch::kGenes; ++g) {
    if (free[g]) n *= kRadix[g];
  }
  return n;
}

arch::ArchCode SearchSpace::code_at(std::uint64_t i) const {
  if (i >= size()) throw std::out_of_range("SearchSpace::code_at: index out of range");
  auto genes = base.genes();
  for (std::size_t g = arch::kGenes; g-- > 0;) {
    if (!free[g]) continue;
    genes[g] = static_cast<std::size_t>(i % kRadix[g]);
    i /= kRadix[g];
  }
  return arch::ArchCode::from_genes(genes);
}

arch::ArchCode SearchSpace::sample(std::mt19937_64& rng) const {
  auto genes = base.genes();
  for (std::size_t g = 0; g < arch::kGenes; ++g) {
    if (free[g]) genes[g] = std::uniform_int_distribution<std::size_t>(0, kRadix[g] - 1)(rng);
  }
  return arch::ArchCode::from_genes(genes);
}

bool SearchSpace::contains(const arch::ArchCode& code) const {
  const auto g = code.genes(), b = base.genes();
  for (std::size_t i = 0; i < arch::kGenes; ++i) {
    if (!free[i] && g[i] != b[i]) return false;
  }
  return true;
}

namespace {

// Unexplored codes: all of them for small spaces, else `draws` random samples.
std::vector<arch::ArchCode> candidate_pool(const SearchSpace& space, std::mt19937_64& rng,
                                           const std::unordered_set<std::uint64_t>& explored, std::size_t draws,
                                           bool* enumerated) {
  std::vector<arch::ArchCode> pool;
  std::unordered_set<std::uint64_t> seen;
  if (space.size() <= draws) {
    *enumerated = true;
    for (std::uint64_t i = 0; i < space.size(); ++i) {
      auto c = space.code_at(i);
      if (!explored.count(arch::encode_index(c))) pool.push_back(c);
    }
    return pool;
  }
  *enumerated = false;
  for (std::size_t i = 0; i < draws; ++i) {
    auto c = space.sample(rng);
    const auto idx = arch::encode_index(c);
    if (explored.count(idx) || !seen.insert(idx).second) continue;
    pool.push_back(c);
  }
  return pool;
}

}  // namespace

Proposal propose_batch(const GpModel* model, const SearchSpace& space, std::size_t population, std::mt19937_64& rng,
                       const std::unordered_set<std::uint64_t>& explored, double best_score, std::size_t pool_size) {
  if (population == 0) throw std::invalid_argument("propose_batch: population must be positive");
  if (pool_size == 0) throw std::invalid_argument("propose_batch: pool size must be positive");
  Proposal out;
  const bool random = model == nullptr || model->observations().empty();
  if (random) {
    const std::uint64_t remaining = space.size() - std::min<std::uint64_t>(space.size(), explored.size());
    if (remaining <= population || space.size() <= pool_size) {
      bool enumerated = false;
      auto pool = candidate_pool(space, rng, explored, pool_size, &enumerated);
      std::shuffle(pool.begin(), pool.end(), rng);
      if (pool.size() > population) pool.resize(population);
      out.codes = std::move(pool);
    } else {
      std::unordered_set<std::uint64_t> taken;
      std::size_t attempts = 0;
      while (out.codes.size() < population && attempts < 1000 * population) {
        ++attempts;
        auto c = space.sample(rng);
        const auto idx = arch::encode_index(c);
        if (explored.count(idx) || !taken.insert(idx).second) continue;
        out.codes.push_back(c);
      }
    }
    out.acquisition.assign(out.codes.size(), 0.0);
    out.exhausted = out.codes.size() < population;
    return out;
  }

  bool enumerated = false;
  auto pool = candidate_pool(space, rng, explored, pool_size, &enumerated);
  struct Ranked {
    double acq;
    double var;
    std::uint64_t index;
    std::size_t pos;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const Posterior p = model->posterior(pool[i]);
    const double acq = 0.5 * std::erfc(-((p.mean - best_score) / std::sqrt(p.variance + 1e-12)) / std::sqrt(2.0));
    ranked.push_back({acq, p.variance, arch::encode_index(pool[i]), i});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.acq != b.acq) return a.acq > b.acq;
    if (a.var != b.var) return a.var > b.var;
    return a.index < b.index;
  });
  for (std::size_t i = 0; i < ranked.size() && out.codes.size() < population; ++i) {
    out.codes.push_back(pool[ranked[i].pos]);
    out.acquisition.push_back(ranked[i].acq);
  }
  out.exhausted = out.codes.size() < population;
  return out;
}

nlohmann::json to_json(const HistoryEntry& e) {
  nlohmann::json j = {{"epoch", e.epoch},
                      {"arch", arch::to_text(e.arch)},
                      {"score", e.score},
                      {"acquisition", e.acquisition},
                      {"phase", e.phase == Phase::kInit ? "init" : "bayes"}};
  if (e.failed) j["failed"] = true;
  return j;
}

HistoryEntry history_entry_from_json(const nlohmann::json& j) {
  HistoryEntry e;
  e.epoch = j.at("epoch").get<std::size_t>();
  e.arch = arch::parse_arch(j.at("arch").get<std::string>());
  e.score = j.at("score").get<double>();
  e.acquisition = j.at("acquisition").get<double>();
  const auto phase = j.at("phase").get<std::string>();
  if (phase != "init" && phase != "bayes") throw std::invalid_argument("history: unknown phase '" + phase + "'");
  e.phase = phase == "init" ? Phase::kInit : Phase::kBayes;
  e.failed = j.value("failed", false);
  return e;
}

namespace {

std::vector<HistoryEntry> load_history(const std::filesystem::path& path) {
  std::vector<HistoryEntry> entries;
  std::ifstream in(path);
  if (!in) return entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      entries.push_back(history_entry_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": bad history entry: " + e.what());
    }
  }
  return entries;
}

std::pair<double, bool> safe_eval(const EvalFn& eval, const arch::ArchCode& code) {
  try {
    const double s = eval(code);
    if (!std::isfinite(s) || s < 0.0 || s > 1.0) return {0.0, true};
    return {s, false};
  } catch (const std::exception&) {
    return {0.0, true};
  }
}

std::vector<std::pair<double, bool>> evaluate_batch(const EvalFn& eval, const std::vector<arch::ArchCode>& codes,
                                                    std::size_t jobs) {
  std::vector<std::pair<double, bool>> results(codes.size());
  const std::size_t workers = std::min(std::max<std::size_t>(1, jobs), codes.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < codes.size(); ++i) results[i] = safe_eval(eval, codes[i]);
    return results;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < codes.size(); i += workers) results[i] = safe_eval(eval, codes[i]);
    });
  }
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace

SearchResult search(const EvalFn& eval, const SearchSpace& space, const SearchConfig& cfg,
                    const std::optional<std::filesystem::path>& history_path,
                    const std::function<void(const std::string&)>& warn) {
  if (cfg.population == 0) throw std::invalid_argument("search: population must be positive");
  if (cfg.init_epochs > cfg.epochs) throw std::invalid_argument("search: init_epochs exceeds epochs");
  SearchResult result;
  std::unordered_set<std::uint64_t> explored;
  std::vector<Observation> observations;
  double best = -1.0;

  auto record = [&](const HistoryEntry& e) {
    explored.insert(arch::encode_index(e.arch));
    observations.push_back({e.arch, e.score});
    if (e.score > best) {
      best = e.score;
      result.best = e.arch;
      result.best_score = e.score;
    }
    result.history.push_back(e);
  };

  std::size_t start_epoch = 0;
  if (history_path && std::filesystem::exists(*history_path)) {
    for (const auto& e : load_history(*history_path)) {
      if (!result.history.empty() && e.epoch != result.history.back().epoch) {
        result.best_so_far.push_back(best);
      }
      record(e);
      start_epoch = e.epoch + 1;
    }
    if (!result.history.empty()) result.best_so_far.push_back(best);
  }

  std::ofstream log;
  if (history_path) {
    log.open(*history_path, std::ios::app);
    if (!log) throw std::runtime_error("cannot append to search history " + history_path->string());
  }

  // Every epoch fits from the configured starting point so that the search
  // state is fully captured by the history file.
  for (std::size_t epoch = start_epoch; epoch < cfg.epochs; ++epoch) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(epoch)};
    std::mt19937_64 rng(seq);
    const Phase phase = epoch < cfg.init_epochs || observations.size() < 2 ? Phase::kInit : Phase::kBayes;
    Proposal proposal;
    if (phase == Phase::kInit) {
      proposal = propose_batch(nullptr, space, cfg.population, rng, explored, best, cfg.pool_size);
    } else {
      GpFitConfig fit = cfg.fit;
      fit.seed = cfg.fit.seed ^ (epoch * 0x9e3779b97f4a7c15ULL);
      const GpModel model = gp_fit(observations, cfg.initial_kernel, fit);
      proposal = propose_batch(&model, space, cfg.population, rng, explored, best, cfg.pool_size);
    }
    if (proposal.exhausted) {
      result.exhausted = true;
      if (warn) warn("search space exhausted at epoch " + std::to_string(epoch));
    }
    const auto scores = evaluate_batch(eval, proposal.codes, cfg.jobs);
    for (std::size_t i = 0; i < proposal.codes.size(); ++i) {
      HistoryEntry e{epoch, proposal.codes[i], scores[i].first, proposal.acquisition[i], phase, scores[i].second};
      if (e.failed && warn) warn("evaluation failed for " + arch::to_text(e.arch) + "; scored 0");
      record(e);
      if (log) log << to_json(e).dump() << "\n";
    }
    if (log) log.flush();
    result.best_so_far.push_back(best);
    if (proposal.codes.empty()) break;
  }
  return result;
}

std::size_t evaluations_to_find(const std::vector<HistoryEntry>& history, const arch::ArchCode& target) {
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (history[i].arch == target) return i + 1;
  }
  return 0;
}

}  // namespace autoshot::bo
