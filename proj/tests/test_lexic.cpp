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

#include <cctype>
#include <fstream>

#include <gtest/gtest.h>

#include "captionrace/lexic.hpp"
#include "support/expect.hpp"
#include "support/paths.hpp"
#include "support/property.hpp"

namespace cr = captionrace;
using cr::lexic::StopWordList;
using cr::lexic::TokenKind;

namespace {

using cr::testing::code_of;

const StopWordList& builtin() { return StopWordList::builtin(); }

}  // namespace

TEST(Normalize, StripsOuterPunctuationAndLowercases) {
  EXPECT_EQ(cr::lexic::normalize("Horse,"), "horse");
  EXPECT_EQ(cr::lexic::normalize("dog"), "dog");
  EXPECT_EQ(cr::lexic::normalize("(\"Man!\")"), "man");
  EXPECT_EQ(cr::lexic::normalize("dog's"), "dog's");
  EXPECT_EQ(cr::lexic::normalize("t-shirt."), "t-shirt");
}

TEST(Normalize, PurePunctuationIsEmpty) {
  EXPECT_EQ(code_of([] { cr::lexic::normalize("---"); }), cr::ErrorCode::kEmptyAfterNormalization);
  EXPECT_FALSE(cr::lexic::try_normalize("?!").has_value());
}

TEST(Normalize, Idempotent) {
  const std::string alphabet = "aBc.,!?;:'\"()[]-xYz";
  const auto failures = cr::testing::for_all(500, 11, [&](cr::Rng& rng) -> std::string {
    std::string raw;
    const auto len = 1 + rng.index(8);
    for (std::size_t i = 0; i < len; ++i) raw += alphabet[rng.index(alphabet.size())];
    auto once = cr::lexic::try_normalize(raw);
    if (!once) return {};
    auto twice = cr::lexic::try_normalize(*once);
    if (twice != once) return "normalize not idempotent on '" + raw + "'";
    for (char c : *once)
      if (std::isupper(static_cast<unsigned char>(c))) return "uppercase survived in '" + raw + "'";
    if (cr::lexic::is_strip_char(once->front()) || cr::lexic::is_strip_char(once->back()))
      return "edge punctuation survived in '" + raw + "'";
    return {};
  });
  EXPECT_TRUE(failures.empty()) << cr::testing::describe(failures);
}

TEST(StopWords, BuiltinCoversFunctionWords) {
  EXPECT_GE(builtin().size(), 25u);
  for (auto w : {"a", "an", "the", "is", "are", "of", "in", "on", "he", "she", "it", "they"})
    EXPECT_TRUE(builtin().contains(w)) << w;
  for (const auto& w : builtin().words()) EXPECT_EQ(cr::lexic::normalize(w), w);
}

TEST(StopWords, LoadsShippedFile) {
  const auto list = StopWordList::load(cr::testing::data("stopwords.txt"));
  EXPECT_EQ(list.words(), builtin().words());
  EXPECT_EQ(list.source(), cr::testing::data("stopwords.txt"));
}

TEST(StopWords, EmptyFileRejected) {
  cr::testing::TempDir dir("stops");
  std::ofstream(dir.file("empty.txt")) << "# only a comment\n\n";
  EXPECT_EQ(code_of([&] { StopWordList::load(dir.file("empty.txt")); }), cr::ErrorCode::kParseError);
  EXPECT_EQ(code_of([&] { StopWordList::load(dir.file("missing.txt")); }), cr::ErrorCode::kIo);
}

TEST(Tokenize, ClassifiesStopAndContent) {
  const StopWordList stops({"a", "is"}, "test");
  const auto tokens = cr::lexic::tokenize("A man is riding a brown horse", stops);
  ASSERT_EQ(tokens.size(), 7u);
  std::vector<std::size_t> stop_positions;
  std::vector<std::string> content;
  for (const auto& t : tokens) {
    if (t.kind == TokenKind::kStop) stop_positions.push_back(t.position);
    else content.push_back(t.norm);
  }
  EXPECT_EQ(stop_positions, (std::vector<std::size_t>{0, 2, 4}));
  EXPECT_EQ(content, (std::vector<std::string>{"man", "riding", "brown", "horse"}));
}

TEST(Tokenize, AllStopWordsIsUnplayable) {
  EXPECT_EQ(code_of([] { cr::lexic::tokenize("The the a", builtin()); }), cr::ErrorCode::kNoContentWords);
}

TEST(Tokenize, SingleWordWithPunctuation) {
  const auto tokens = cr::lexic::tokenize("Dog.", builtin());
  ASSERT_EQ(tokens.size(), 1u);
  EXPECT_EQ(tokens[0].norm, "dog");
  EXPECT_EQ(tokens[0].surface, "Dog.");
  EXPECT_EQ(tokens[0].kind, TokenKind::kContent);
}

TEST(Tokenize, DropsPunctuationSpansWithoutConsumingPositions) {
  const auto tokens = cr::lexic::tokenize("a dog -- runs !", builtin());
  ASSERT_EQ(tokens.size(), 3u);
  EXPECT_EQ(tokens[2].norm, "runs");
  EXPECT_EQ(tokens[2].position, 2u);
}

TEST(Tokenize, HyphenatedCompoundIsOneToken) {
  const auto tokens = cr::lexic::tokenize("a double-decker bus", builtin());
  ASSERT_EQ(tokens.size(), 3u);
  EXPECT_EQ(tokens[1].norm, "double-decker");
}

TEST(Tokenize, RoundTripAndPartitionProperties) {
  const std::vector<std::string> words{"A", "man", "the", "Horse,", "riding", "is", "(brown)", "dog's", "--", "on",
                                       "FIELD!", "near", "tree", "?", "of", "kite"};
  const auto failures = cr::testing::for_all(400, 12, [&](cr::Rng& rng) -> std::string {
    std::string sentence;
    const auto n = 1 + rng.index(12);
    for (std::size_t i = 0; i < n; ++i) sentence += (i ? std::string(1 + rng.index(2), ' ') : "") + cr::testing::pick(rng, words);
    std::vector<cr::lexic::Token> tokens;
    try {
      tokens = cr::lexic::tokenize(sentence, builtin());
    } catch (const cr::Error& e) {
      return e.code() == cr::ErrorCode::kNoContentWords ? std::string{} : std::string("unexpected ") + e.what();
    }
    std::string rejoined;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (tokens[i].position != i) return "positions not consecutive in '" + sentence + "'";
      if (tokens[i].norm.empty()) return "empty norm";
      if ((tokens[i].kind == TokenKind::kStop) != builtin().contains(tokens[i].norm)) return "misclassified";
      rejoined += (i ? " " : "") + tokens[i].surface;
    }
    const auto again = cr::lexic::tokenize(rejoined, builtin());
    if (again != tokens) return "round trip changed tokens for '" + sentence + "'";
    return {};
  });
  EXPECT_TRUE(failures.empty()) << cr::testing::describe(failures);
}

TEST(Matches, ExactAfterNormalization) {
  const auto tokens = cr::lexic::tokenize("horse man", builtin());
  EXPECT_TRUE(cr::lexic::matches("HORSE", tokens[0]));
  EXPECT_FALSE(cr::lexic::matches("horses", tokens[0]));
  EXPECT_TRUE(cr::lexic::matches("man!", tokens[1]));
  EXPECT_TRUE(cr::lexic::matches("  man ", tokens[1]));
}

TEST(Matches, PunctuationGuessFlagsEmpty) {
  const auto tokens = cr::lexic::tokenize("horse", builtin());
  const auto m = cr::lexic::matches("...", tokens[0]);
  EXPECT_FALSE(m.matched);
  EXPECT_TRUE(m.empty_guess);
}

TEST(Utf8, LengthCountsCodePoints) {
  EXPECT_EQ(cr::lexic::utf8_length("caf\xC3\xA9"), 4u);
  EXPECT_EQ(cr::lexic::utf8_length("dog"), 3u);
}
