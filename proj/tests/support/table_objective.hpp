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
#include <random>
#include <vector>

#include "autoshot/bo_search.hpp"

namespace autoshot::testing {

/// A seeded lookup-table objective over a reduced space (two block genes and
/// the attention depth, 16 * 16 * 5 = 1280 codes). The score is a per-gene
/// additive table plus a weaker pairwise table over the two block genes, so
/// there is structure for a surrogate to find but no closed-form shortcut.
struct TableObjective {
  bo::SearchSpace space;
  std::vector<std::size_t> free_genes;
  std::vector<std::vector<double>> unary;  ///< per free gene
  std::vector<double> pair;                ///< [value_a * 16 + value_b]
  arch::ArchCode optimum;
  double best = 0.0;

  double operator()(const arch::ArchCode& code) const {
    const auto g = code.genes();
    double s = 0.0;
    for (std::size_t i = 0; i < free_genes.size(); ++i) s += unary[i][g[free_genes[i]]];
    s += 0.5 * pair[g[free_genes[0]] * arch::kOptionsPerBlock + g[free_genes[1]]];
    return s / (static_cast<double>(free_genes.size()) + 0.5);
  }
};

inline TableObjective make_table_objective(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  TableObjective t;
  std::uniform_int_distribution<std::size_t> block(0, arch::kSearchBlocks - 1);
  const std::size_t a = block(rng);
  std::size_t b = block(rng);
  while (b == a) b = block(rng);
  t.free_genes = {std::min(a, b), std::max(a, b), arch::kSearchBlocks};
  t.space = bo::SearchSpace::reduced(t.free_genes, arch::transnetv2_reference());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t g : t.free_genes) {
    const std::size_t k = g == arch::kSearchBlocks ? arch::kAttentionOptions : arch::kOptionsPerBlock;
    std::vector<double> row(k);
    for (auto& v : row) v = u(rng);
    t.unary.push_back(row);
  }
  t.pair.resize(arch::kOptionsPerBlock * arch::kOptionsPerBlock);
  for (auto& v : t.pair) v = u(rng);
  for (std::uint64_t i = 0; i < t.space.size(); ++i) {
    const arch::ArchCode c = t.space.code_at(i);
    const double s = t(c);
    if (s > t.best) {
      t.best = s;
      t.optimum = c;
    }
  }
  return t;
}

}  // namespace autoshot::testing
