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

#include "autoshot/arch.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace autoshot::arch {

namespace {

constexpr std::array<int, 3> kChannelMultiples{4, 8, 12};
constexpr std::array<int, 2> kBranches{4, 5};

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string upper(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return s;
}

int parse_int(const std::string& s, const std::string& context) {
  int v = 0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) throw ArchError(context + ": expected an integer, got '" + s + "'");
  return v;
}

std::string strip_key(const std::string& arg, const std::string& key) {
  const std::string u = upper(arg);
  const std::string k = upper(key) + "=";
  if (u.rfind(k, 0) == 0) return trim(arg.substr(k.size()));
  return arg;
}

BlockGene parse_gene(const std::string& raw, std::size_t position) {
  const std::string text = trim(raw);
  const std::string where = "block " + std::to_string(position + 1) + " '" + text + "'";
  const auto open = text.find('(');
  if (open == std::string::npos || text.back() != ')') throw ArchError(where + ": expected NAME(args)");
  std::string name = upper(trim(text.substr(0, open)));
  if (name.rfind("DDCNN", 0) == 0) name = name.substr(5);

  BlockGene gene;
  if (name == "V2") {
    gene.kind = BlockKind::kV2;
  } else if (name == "V2A" || name == "A") {
    gene.kind = BlockKind::kV2A;
  } else if (name == "V2B" || name == "B") {
    gene.kind = BlockKind::kV2B;
  } else if (name == "V2C" || name == "C") {
    gene.kind = BlockKind::kV2C;
  } else {
    throw ArchError(where + ": unknown block family '" + name + "'");
  }

  std::vector<std::string> args;
  std::string inner = text.substr(open + 1, text.size() - open - 2);
  std::size_t start = 0;
  while (true) {
    const auto comma = inner.find(',', start);
    args.push_back(trim(inner.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }

  const bool has_channels = gene.kind == BlockKind::kV2 || gene.kind == BlockKind::kV2A;
  if (args.size() != (has_channels ? 2u : 1u)) {
    throw ArchError(where + ": " + kind_name(gene.kind) + " takes " + (has_channels ? "(n_c, n_d)" : "(n_d)"));
  }
  if (has_channels) {
    std::string nc = upper(strip_key(args[0], "nc"));
    if (nc.empty() || nc.back() != 'F') throw ArchError(where + ": n_c must be written as a multiple of F, e.g. 4F");
    gene.channel_multiple = parse_int(nc.substr(0, nc.size() - 1), where);
    gene.branches = parse_int(strip_key(args[1], "nd"), where);
  } else {
    gene.channel_multiple = 0;
    gene.branches = parse_int(strip_key(args[0], "nd"), where);
  }
  try {
    validate(gene);
  } catch (const ArchError& e) {
    throw ArchError(where + ": " + e.what());
  }
  return gene;
}

}  // namespace

std::string kind_name(BlockKind kind) {
  switch (kind) {
    case BlockKind::kV2: return "V2";
    case BlockKind::kV2A: return "V2A";
    case BlockKind::kV2B: return "V2B";
    case BlockKind::kV2C: return "V2C";
  }
  return "?";
}

void validate(const BlockGene& gene) {
  if (std::find(kBranches.begin(), kBranches.end(), gene.branches) == kBranches.end()) {
    throw ArchError(to_text(gene) + ": n_d must be 4 or 5, got " + std::to_string(gene.branches));
  }
  const bool has_channels = gene.kind == BlockKind::kV2 || gene.kind == BlockKind::kV2A;
  if (has_channels) {
    if (std::find(kChannelMultiples.begin(), kChannelMultiples.end(), gene.channel_multiple) == kChannelMultiples.end()) {
      throw ArchError(to_text(gene) + ": n_c must be one of 4F, 8F, 12F, got " + std::to_string(gene.channel_multiple) + "F");
    }
  } else if (gene.channel_multiple != 0) {
    throw ArchError(to_text(gene) + ": " + kind_name(gene.kind) + " has no n_c degree of freedom");
  }
}

// Options 0..5 V2, 6..11 V2A (n_c major, n_d minor), 12..13 V2B, 14..15 V2C.
std::size_t gene_to_option(const BlockGene& gene) {
  validate(gene);
  const std::size_t nd = gene.branches == 4 ? 0 : 1;
  switch (gene.kind) {
    case BlockKind::kV2:
    case BlockKind::kV2A: {
      const std::size_t nc = static_cast<std::size_t>(gene.channel_multiple / 4 - 1);
      return (gene.kind == BlockKind::kV2 ? 0 : 6) + nc * 2 + nd;
    }
    case BlockKind::kV2B: return 12 + nd;
    case BlockKind::kV2C: return 14 + nd;
  }
  return 0;
}

BlockGene option_to_gene(std::size_t option) {
  if (option >= kOptionsPerBlock) throw ArchError("block option " + std::to_string(option) + " out of range [0, 16)");
  BlockGene g;
  if (option < 12) {
    g.kind = option < 6 ? BlockKind::kV2 : BlockKind::kV2A;
    const std::size_t r = option % 6;
    g.channel_multiple = kChannelMultiples[r / 2];
    g.branches = kBranches[r % 2];
  } else {
    g.kind = option < 14 ? BlockKind::kV2B : BlockKind::kV2C;
    g.channel_multiple = 0;
    g.branches = kBranches[(option - 12) % 2];
  }
  return g;
}

std::vector<BlockGene> enumerate_block_genes() {
  std::vector<BlockGene> out;
  for (std::size_t o = 0; o < kOptionsPerBlock; ++o) out.push_back(option_to_gene(o));
  return out;
}

std::string to_text(const BlockGene& gene) {
  if (gene.kind == BlockKind::kV2 || gene.kind == BlockKind::kV2A) {
    return kind_name(gene.kind) + "(" + std::to_string(gene.channel_multiple) + "F," + std::to_string(gene.branches) + ")";
  }
  return kind_name(gene.kind) + "(" + std::to_string(gene.branches) + ")";
}

std::array<std::size_t, kGenes> ArchCode::genes() const {
  std::array<std::size_t, kGenes> g{};
  for (std::size_t i = 0; i < kSearchBlocks; ++i) g[i] = gene_to_option(blocks[i]);
  g[kSearchBlocks] = static_cast<std::size_t>(attention_layers);
  return g;
}

ArchCode ArchCode::from_genes(const std::array<std::size_t, kGenes>& genes) {
  ArchCode code;
  for (std::size_t i = 0; i < kSearchBlocks; ++i) code.blocks[i] = option_to_gene(genes[i]);
  if (genes[kSearchBlocks] >= kAttentionOptions) {
    throw ArchError("attention gene " + std::to_string(genes[kSearchBlocks]) + " out of range [0, 5)");
  }
  code.attention_layers = static_cast<int>(genes[kSearchBlocks]);
  return code;
}

void validate(const ArchCode& code) {
  for (std::size_t i = 0; i < kSearchBlocks; ++i) {
    try {
      validate(code.blocks[i]);
    } catch (const ArchError& e) {
      throw ArchError("block " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  if (code.attention_layers < 0 || code.attention_layers >= static_cast<int>(kAttentionOptions)) {
    throw ArchError("attention layers must be in {0,1,2,3,4}, got " + std::to_string(code.attention_layers));
  }
}

ArchCode encode_arch(const std::array<BlockGene, kSearchBlocks>& blocks, int attention_layers) {
  ArchCode code{blocks, attention_layers};
  validate(code);
  return code;
}

std::uint64_t search_space_size() {
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < kSearchBlocks; ++i) n *= kOptionsPerBlock;
  return n * kAttentionOptions;
}

std::uint64_t encode_index(const ArchCode& code) {
  const auto g = code.genes();
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < kSearchBlocks; ++i) idx = idx * kOptionsPerBlock + g[i];
  return idx * kAttentionOptions + g[kSearchBlocks];
}

ArchCode decode_index(std::uint64_t index) {
  if (index >= search_space_size()) throw ArchError("architecture index " + std::to_string(index) + " out of range");
  std::array<std::size_t, kGenes> g{};
  g[kSearchBlocks] = index % kAttentionOptions;
  index /= kAttentionOptions;
  for (std::size_t i = kSearchBlocks; i-- > 0;) {
    g[i] = index % kOptionsPerBlock;
    index /= kOptionsPerBlock;
  }
  return ArchCode::from_genes(g);
}

std::string to_text(const ArchCode& code) {
  std::string s;
  for (std::size_t i = 0; i < kSearchBlocks; ++i) {
    if (i) s += ',';
    s += to_text(code.blocks[i]);
  }
  return s + ";attn=" + std::to_string(code.attention_layers);
}

ArchCode parse_arch(std::string_view text) {
  std::string body(text);
  int attention = 0;
  if (const auto semi = body.find(';'); semi != std::string::npos) {
    std::string tail = trim(std::string_view(body).substr(semi + 1));
    body = body.substr(0, semi);
    const std::string key = upper(tail.substr(0, std::min<std::size_t>(tail.size(), 5)));
    if (key != "ATTN=") throw ArchError("expected ';attn=K' suffix, got ';" + tail + "'");
    attention = parse_int(trim(tail.substr(5)), "attention depth");
  }

  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char ch : body) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!trim(cur).empty() || !parts.empty()) parts.push_back(cur);
  if (parts.size() != kSearchBlocks) {
    throw ArchError("expected 6 search blocks, got " + std::to_string(parts.size()) + " in '" + std::string(text) + "'");
  }

  ArchCode code;
  for (std::size_t i = 0; i < kSearchBlocks; ++i) code.blocks[i] = parse_gene(parts[i], i);
  code.attention_layers = attention;
  validate(code);
  return code;
}

nlohmann::json to_json(const ArchCode& code) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : code.blocks) {
    nlohmann::json jb{{"kind", kind_name(b.kind)}, {"nd", b.branches}};
    if (b.channel_multiple) jb["nc"] = std::to_string(b.channel_multiple) + "F";
    blocks.push_back(jb);
  }
  return {{"text", to_text(code)},
          {"index", encode_index(code)},
          {"blocks", blocks},
          {"attention_layers", code.attention_layers}};
}

ArchCode arch_from_json(const nlohmann::json& j) {
  if (j.contains("text")) return parse_arch(j.at("text").get<std::string>());
  if (j.contains("index")) return decode_index(j.at("index").get<std::uint64_t>());
  throw ArchError("architecture descriptor needs a 'text' or 'index' field");
}

ArchCode autoshot_f1() { return parse_arch("V2(4F,4),V2A(4F,5),V2A(4F,5),V2A(4F,5),V2(12F,5),V2(8F,5);attn=0"); }

ArchCode autoshot_precision() { return parse_arch("V2(12F,4),V2(8F,4),B(4),C(4),B(5),B(4);attn=0"); }

ArchCode transnetv2_reference() { return parse_arch("V2(8F,4),V2(8F,4),V2(8F,4),V2(8F,4),V2(8F,4),V2(8F,4);attn=0"); }

}  // namespace autoshot::arch
