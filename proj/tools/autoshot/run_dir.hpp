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

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "autoshot/run_config.hpp"

namespace autoshot::cli {

/// Output directory of one CLI invocation. Opening it writes the fully
/// resolved configuration to config.txt so every artifact sits next to the
/// settings that produced it.
class RunDir {
 public:
  RunDir(std::filesystem::path root, const RunConfig& cfg);

  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path operator/(const std::string& name) const { return root_ / name; }

 private:
  std::filesystem::path root_;
};

/// Writes through `fill` into `<path>.partial` and renames it into place
/// only on success, so an interrupted command never leaves a truncated file
/// under the final name.
void write_atomically(const std::filesystem::path& path, const std::function<void(std::ostream&)>& fill,
                      bool binary = false);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace autoshot::cli
