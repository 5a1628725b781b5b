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
#include <filesystem>
#include <iosfwd>

#include <nlohmann/json.hpp>

#include "autoshot/network.hpp"

namespace autoshot {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary layout: "ASCP", u32 version, u32 header length, header JSON
/// (kind, architecture, network config), u32 tensor count, then per tensor
/// u32 name length, name, u32 rank, u64 dims, float64 values. All integers
/// and floats are little-endian.
void save_model(std::ostream& out, Model& model);
Model load_model(std::istream& in);
void save_model_file(const std::filesystem::path& path, Model& model);
Model load_model_file(const std::filesystem::path& path);

void save_supernet(std::ostream& out, SuperNet& net);
SuperNet load_supernet(std::istream& in);
void save_supernet_file(const std::filesystem::path& path, SuperNet& net);
SuperNet load_supernet_file(const std::filesystem::path& path);

/// Header JSON of a checkpoint file without loading the tensors.
nlohmann::json read_checkpoint_header(const std::filesystem::path& path);

}  // namespace autoshot
