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
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace autoshot::arch {

/// Factorized 3D-convolution block families.
///  kV2   per-branch spatial conv, then dilated temporal conv, concatenated
///  kV2A  one shared spatial conv feeding every dilated temporal branch
///  kV2B  spatial conv and temporal branches both read the input; summed
///  kV2C  temporal branches read the spatial conv output; summed with it
enum class BlockKind : std::uint8_t { kV2, kV2A, kV2B, kV2C };

inline constexpr std::size_t kSearchBlocks = 6;
inline constexpr std::size_t kOptionsPerBlock = 16;
inline constexpr std::size_t kAttentionOptions = 5;  // 0..4 layers
inline constexpr std::size_t kGenes = kSearchBlocks + 1;

class ArchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One search-block choice. `channel_multiple` is the spatial width n_c in
/// units of F (4, 8 or 12) for V2/V2A and 0 for V2B/V2C, whose spatial width
/// is tied to the temporal concatenation. `branches` is n_d (4 or 5).
struct BlockGene {
  BlockKind kind = BlockKind::kV2;
  int channel_multiple = 4;
  int branches = 4;

  friend bool operator==(const BlockGene&, const BlockGene&) = default;
};

void validate(const BlockGene& gene);
std::size_t gene_to_option(const BlockGene& gene);
BlockGene option_to_gene(std::size_t option);
std::vector<BlockGene> enumerate_block_genes();

std::string kind_name(BlockKind kind);
std::string to_text(const BlockGene& gene);

struct ArchCode {
  std::array<BlockGene, kSearchBlocks> blocks{};
  int attention_layers = 0;

  /// Option index of each of the 7 genes (6 blocks, then attention depth).
  std::array<std::size_t, kGenes> genes() const;
  static ArchCode from_genes(const std::array<std::size_t, kGenes>& genes);

  friend bool operator==(const ArchCode&, const ArchCode&) = default;
};

/// Validates every gene and assembles a code; errors name the offending gene.
ArchCode encode_arch(const std::array<BlockGene, kSearchBlocks>& blocks, int attention_layers);
void validate(const ArchCode& code);

/// 16^6 * 5.
std::uint64_t search_space_size();

/// Mixed-radix index in [0, search_space_size()).
std::uint64_t encode_index(const ArchCode& code);
ArchCode decode_index(std::uint64_t index);

/// Canonical text, e.g. "V2(4F,4),V2A(4F,5),V2B(4),V2C(5),V2(12F,5),V2(8F,5);attn=0".
std::string to_text(const ArchCode& code);

/// Parses the canonical text plus the short aliases A/B/C for V2A/V2B/V2C and
/// the keyword form "V2A(nc=4F,nd=5)". A missing ";attn=" suffix means 0.
ArchCode parse_arch(std::string_view text);

nlohmann::json to_json(const ArchCode& code);
ArchCode arch_from_json(const nlohmann::json& j);

/// Architectures reported for the searched networks and the all-V2 baseline.
ArchCode autoshot_f1();
ArchCode autoshot_precision();
ArchCode transnetv2_reference();

}  // namespace autoshot::arch
