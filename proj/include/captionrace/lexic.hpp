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
#include <cctype>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "captionrace/error.hpp"

// Text layer: normalization, stop-word classification and guess matching.
// Everything here is a pure function over immutable inputs.
namespace captionrace::lexic {

inline constexpr std::string_view kStripSet = ".,!?;:'\"()[]-";

inline bool is_strip_char(char c) { return kStripSet.find(c) != std::string_view::npos; }

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

/// Lowercases and strips leading/trailing punctuation from a single
/// whitespace-free span. Internal punctuation ("dog's", "t-shirt") survives.
/// Returns nullopt when nothing is left.
inline std::optional<std::string> try_normalize(std::string_view raw) {
  std::size_t begin = 0;
  std::size_t end = raw.size();
  while (begin < end && is_strip_char(raw[begin])) ++begin;
  while (end > begin && is_strip_char(raw[end - 1])) --end;
  if (begin == end) return std::nullopt;
  std::string out(raw.substr(begin, end - begin));
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

inline std::string normalize(std::string_view raw) {
  if (auto n = try_normalize(raw)) return *std::move(n);
  throw Error(ErrorCode::kEmptyAfterNormalization, "'" + std::string(raw) + "'");
}

/// Number of UTF-8 code points; used for blank lengths on the wire.
inline std::size_t utf8_length(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_whitespace(std::string_view text) {
  std::vector<std::string_view> spans;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) spans.push_back(text.substr(start, i - start));
  }
  return spans;
}

class StopWordList {
 public:
  StopWordList() = default;

  StopWordList(std::initializer_list<std::string_view> words, std::string source)
      : source_(std::move(source)) {
    for (auto w : words) insert(w);
  }

  template <class Range>
  static StopWordList from_words(const Range& words, std::string source) {
    StopWordList list;
    list.source_ = std::move(source);
    for (const auto& w : words) list.insert(w);
    return list;
  }

  /// Function words shown in place and never turned into blanks.
  static const StopWordList& builtin() {
    static const StopWordList list{
        {"a", "an", "the",
         "is", "are", "was", "were", "be", "been", "being", "am",
         "of", "in", "on", "at", "to", "with", "by", "for", "from", "into", "onto",
         "over", "under", "near", "next", "behind", "beside", "through", "around", "up", "out",
         "and", "or", "but", "as", "while", "there", "some",
         "he", "she", "it", "they", "his", "her", "its", "their", "them", "him",
         "this", "that", "these", "those", "who", "which",
         "has", "have"},
        "builtin"};
    return list;
  }

  /// One word per line; `#` starts a comment, blank lines are ignored.
  static StopWordList load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIo, "cannot open stop-word list " + path);
    StopWordList list;
    list.source_ = path;
    std::string line;
    while (std::getline(in, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      for (auto span : split_whitespace(line)) list.insert(span);
    }
    if (list.words_.empty()) throw Error(ErrorCode::kParseError, "stop-word list " + path + " is empty");
    return list;
  }

  bool contains(std::string_view norm) const { return words_.find(norm) != words_.end(); }
  std::size_t size() const noexcept { return words_.size(); }
  const std::set<std::string, std::less<>>& words() const noexcept { return words_; }
  const std::string& source() const noexcept { return source_; }

 private:
  void insert(std::string_view raw) {
    if (auto n = try_normalize(raw)) words_.insert(*std::move(n));
  }

  std::set<std::string, std::less<>> words_;
  std::string source_ = "builtin";
};

enum class TokenKind { kStop, kContent };

struct Token {
  std::string surface;
  std::string norm;
  std::size_t position = 0;
  TokenKind kind = TokenKind::kContent;

  bool is_content() const noexcept { return kind == TokenKind::kContent; }
  friend bool operator==(const Token&, const Token&) = default;
};

/// Whitespace tokenization; pure-punctuation spans are dropped and do not
/// consume a position. Throws NO_CONTENT_WORDS for unplayable sentences.
inline std::vector<Token> tokenize(std::string_view sentence, const StopWordList& stops) {
  std::vector<Token> tokens;
  bool any_content = false;
  for (auto span : split_whitespace(sentence)) {
    auto norm = try_normalize(span);
    if (!norm) continue;
    const auto kind = stops.contains(*norm) ? TokenKind::kStop : TokenKind::kContent;
    any_content = any_content || kind == TokenKind::kContent;
    tokens.push_back(Token{std::string(span), *std::move(norm), tokens.size(), kind});
  }
  if (!any_content) throw Error(ErrorCode::kNoContentWords, "'" + std::string(sentence) + "'");
  return tokens;
}

struct MatchResult {
  bool matched = false;
  bool empty_guess = false;  // the guess normalized to nothing

  explicit operator bool() const noexcept { return matched; }
};

/// Exact equality after normalization; no stemming or plural folding.
inline MatchResult matches(std::string_view guess, const Token& token) {
  auto norm = try_normalize(trim(guess));
  if (!norm) return {false, true};
  return {*norm == token.norm, false};
}

}  // namespace captionrace::lexic
