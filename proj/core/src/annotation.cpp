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

#include "autoshot/annotation.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace autoshot::annot {

namespace {

std::string parse_message(std::size_t line, const std::string& detail, const std::string& source) {
  std::string msg = source.empty() ? "" : source + ": ";
  if (line != 0) msg += "line " + std::to_string(line) + ": ";
  return msg + detail;
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& detail, const std::string& source)
    : std::runtime_error(parse_message(line, detail, source)), line_(line), detail_(detail) {}

namespace {

void check_shot(const Shot& s, const Shot* previous, std::size_t line) {
  if (s.begin < 0 || s.end < 0) throw ParseError(line, "frame indices must be non-negative");
  if (s.begin > s.end) {
    throw ParseError(line, "shot begins at " + std::to_string(s.begin) + " after it ends at " + std::to_string(s.end));
  }
  if (previous != nullptr && s.begin <= previous->end) {
    throw ParseError(line, "shot beginning at " + std::to_string(s.begin) + " overlaps the previous shot ending at " +
                               std::to_string(previous->end));
  }
}

Frame parse_frame(std::string_view token, std::size_t line) {
  Frame value = 0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  if (!token.empty() && token.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) {
    throw ParseError(line, "expected a frame number, got '" + std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; };
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

}  // namespace

void validate(const ShotAnnotation& ann) {
  const Shot* previous = nullptr;
  for (const auto& s : ann.shots) {
    check_shot(s, previous, 0);
    previous = &s;
  }
}

ShotAnnotation parse_annotation(std::string_view text) {
  ShotAnnotation ann;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(pos, nl - pos);
    ++line_no;
    pos = nl + 1;
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 2) {
      throw ParseError(line_no, "expected two frame numbers, got " + std::to_string(tokens.size()) + " tokens");
    }
    Shot s{parse_frame(tokens[0], line_no), parse_frame(tokens[1], line_no)};
    check_shot(s, ann.shots.empty() ? nullptr : &ann.shots.back(), line_no);
    ann.shots.push_back(s);
  }
  return ann;
}

std::string write_annotation(const ShotAnnotation& ann) {
  validate(ann);
  std::string out;
  for (const auto& s : ann.shots) out += std::to_string(s.begin) + " " + std::to_string(s.end) + "\n";
  return out;
}

ShotAnnotation read_annotation_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open annotation file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_annotation(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.detail(), path.string());
  }
}

void write_annotation_file(const std::filesystem::path& path, const ShotAnnotation& ann) {
  const std::string text = write_annotation(ann);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write annotation file " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing annotation file " + path.string());
}

std::vector<TransitionSpan> derive_transitions(const ShotAnnotation& ann) {
  std::vector<TransitionSpan> spans;
  for (std::size_t k = 0; k + 1 < ann.shots.size(); ++k) {
    const Frame end = ann.shots[k].end;
    const Frame next = ann.shots[k + 1].begin;
    if (next == end + 1) {
      spans.push_back({TransitionKind::kHard, end, end});
    } else {
      spans.push_back({TransitionKind::kGradual, end, next - 1});
    }
  }
  return spans;
}

}  // namespace autoshot::annot
