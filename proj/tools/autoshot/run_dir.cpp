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

#include "run_dir.hpp"

#include <fstream>
#include <stdexcept>

namespace autoshot::cli {

namespace fs = std::filesystem;

RunDir::RunDir(fs::path root, const RunConfig& cfg) : root_(std::move(root)) {
  fs::create_directories(root_);
  const std::string text = to_config_text(cfg);
  write_atomically(root_ / "config.txt", [&](std::ostream& out) { out << text; });
}

void write_atomically(const fs::path& path, const std::function<void(std::ostream&)>& fill, bool binary) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path partial = path;
  partial += ".partial";
  try {
    {
      std::ofstream out(partial, binary ? std::ios::binary : std::ios::out);
      if (!out) throw std::runtime_error("cannot write " + partial.string());
      fill(out);
      out.flush();
      if (!out) throw std::runtime_error("failed writing " + partial.string());
    }
    fs::rename(partial, path);
  } catch (...) {
    std::error_code ignored;
    fs::remove(partial, ignored);
    throw;
  }
}

void write_json_file(const fs::path& path, const nlohmann::json& j) {
  write_atomically(path, [&](std::ostream& out) { out << j.dump(2) << "\n"; });
}

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path.string() + ": invalid JSON: " + e.what());
  }
}

}  // namespace autoshot::cli
