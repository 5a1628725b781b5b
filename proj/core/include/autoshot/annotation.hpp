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
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace autoshot::annot {

/// Frame indices are 0-based.
using Frame = std::int64_t;

struct Shot {
  Frame begin = 0;
  Frame end = 0;

  friend bool operator==(const Shot&, const Shot&) = default;
};

/// Ordered shots; the gap between consecutive shots is a gradual transition.
struct ShotAnnotation {
  std::vector<Shot> shots;

  friend bool operator==(const ShotAnnotation&, const ShotAnnotation&) = default;
};

/// Annotation text error; line() is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& detail, const std::string& source = "");
  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

/// Throws ParseError (line 0) for negative indices, begin > end or overlap.
void validate(const ShotAnnotation& ann);

/// One "begin end" pair per line; blank lines are skipped.
ShotAnnotation parse_annotation(std::string_view text);
std::string write_annotation(const ShotAnnotation& ann);

ShotAnnotation read_annotation_file(const std::filesystem::path& path);
void write_annotation_file(const std::filesystem::path& path, const ShotAnnotation& ann);

enum class TransitionKind { kHard, kGradual };

/// Inclusive frame interval. Hard cuts sit on the last frame of the outgoing
/// shot; gradual spans run from that frame to the frame before the next shot.
struct TransitionSpan {
  TransitionKind kind = TransitionKind::kHard;
  Frame lo = 0;
  Frame hi = 0;

  friend bool operator==(const TransitionSpan&, const TransitionSpan&) = default;
};

std::vector<TransitionSpan> derive_transitions(const ShotAnnotation& ann);

}  // namespace autoshot::annot
