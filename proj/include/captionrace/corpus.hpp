// Copyright 2026 The captionrace Authors.
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

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "captionrace/error.hpp"
#include "captionrace/lexic.hpp"
#include "captionrace/types.hpp"

namespace captionrace {

struct CorpusImage {
  ImageId id;
  std::string locator;            // URL or path relative to the corpus file
  std::vector<std::string> tags;  // normalized ground-truth vocabulary, may be empty

  bool has_tags() const noexcept { return !tags.empty(); }
  friend bool operator==(const CorpusImage&, const CorpusImage&) = default;
};

inline void to_json(nlohmann::json& j, const CorpusImage& img) {
  j = {{"imageId", img.id}, {"locator", img.locator}};
  if (img.has_tags()) j["tags"] = img.tags;
}

namespace detail {

inline std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line on which each element of the top-level array starts. nlohmann/json
// keeps no source positions, so this is a small structural scan.
inline std::vector<std::size_t> array_element_lines(std::string_view text) {
  std::vector<std::size_t> lines;
  std::size_t line = 1;
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  bool expect_element = false;
  for (char c : text) {
    if (c == '\n') ++line;
    if (in_string) {
      if (escaped) escaped = false;
      else if (c == '\\') escaped = true;
      else if (c == '"') in_string = false;
      continue;
    }
    if (depth == 1 && expect_element && !lexic::is_space(c) && c != ']') {
      lines.push_back(line);
      expect_element = false;
    }
    switch (c) {
      case '"': in_string = true; break;
      case '[':
      case '{':
        if (++depth == 1) expect_element = true;
        break;
      case ']':
      case '}': --depth; break;
      case ',':
        if (depth == 1) expect_element = true;
        break;
      default: break;
    }
  }
  return lines;
}

}  // namespace detail

/// Parses a corpus document: a JSON array of {"imageId", "locator", "tags"?}.
/// `origin` names the source in error messages.
inline std::vector<CorpusImage> parse_corpus(std::string_view text, const std::string& origin = "<corpus>") {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError,
                origin + ":" + std::to_string(detail::line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1)) + ": " + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::kParseError, origin + ":1: corpus must be a JSON array");

  const auto lines = detail::array_element_lines(text);
  auto where = [&](std::size_t i) {
    return origin + ":" + std::to_string(i < lines.size() ? lines[i] : 1) + ": ";
  };

  std::vector<CorpusImage> images;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& entry = doc[i];
    if (!entry.is_object()) throw Error(ErrorCode::kParseError, where(i) + "entry is not an object");
    const auto id = entry.find("imageId");
    const auto loc = entry.find("locator");
    if (id == entry.end() || !id->is_string() || id->get<std::string>().empty())
      throw Error(ErrorCode::kParseError, where(i) + "missing or empty imageId");
    if (loc == entry.end() || !loc->is_string() || loc->get<std::string>().empty())
      throw Error(ErrorCode::kParseError, where(i) + "missing or empty locator");

    CorpusImage img{ImageId{id->get<std::string>()}, loc->get<std::string>(), {}};
    if (auto tags = entry.find("tags"); tags != entry.end() && !tags->is_null()) {
      if (!tags->is_array()) throw Error(ErrorCode::kParseError, where(i) + "tags must be an array");
      for (const auto& t : *tags) {
        if (!t.is_string()) throw Error(ErrorCode::kParseError, where(i) + "tag is not a string");
        auto norm = lexic::try_normalize(lexic::trim(t.get<std::string>()));
        if (!norm) throw Error(ErrorCode::kParseError, where(i) + "tag normalizes to nothing");
        if (std::find(img.tags.begin(), img.tags.end(), *norm) == img.tags.end()) img.tags.push_back(*norm);
      }
    }
    if (!seen.insert(img.id.str()).second)
      throw Error(ErrorCode::kDuplicateImageId, where(i) + img.id.str());
    images.push_back(std::move(img));
  }
  return images;
}

inline std::vector<CorpusImage> load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open corpus " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str(), path);
}

}  // namespace captionrace
