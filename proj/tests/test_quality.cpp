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

#include <gtest/gtest.h>

#include "captionrace/quality.hpp"
#include "support/expect.hpp"
#include "support/oracles.hpp"
#include "support/paths.hpp"
#include "support/property.hpp"

namespace cr = captionrace;
namespace quality = cr::quality;
using cr::testing::code_of;

namespace {

const quality::Lexicons& lex() {
  static const auto l = quality::Lexicons::load(cr::testing::data_dir() / "lexicon");
  return l;
}

}  // namespace

TEST(Lexicons, ShippedFilesMeetMinimumsAndAreDisjoint) {
  EXPECT_GE(lex().nouns().size(), 200u);
  EXPECT_GE(lex().adjectives().size(), 80u);
  EXPECT_GE(lex().relations().size(), 40u);
  for (const auto& w : lex().nouns()) {
    EXPECT_FALSE(lex().adjectives().count(w)) << w;
    EXPECT_FALSE(lex().relations().count(w)) << w;
  }
  for (const auto& w : lex().adjectives()) EXPECT_FALSE(lex().relations().count(w)) << w;
}

TEST(Lexicons, OverlapRejected) {
  EXPECT_EQ(code_of([] { quality::Lexicons({"dog"}, {"Dog"}, {}); }), cr::ErrorCode::kInvalidLexicon);
  EXPECT_EQ(code_of([] { lex().with_noun("red"); }), cr::ErrorCode::kInvalidLexicon);
}

TEST(Lexicons, TooSmallDirectoryRejected) {
  cr::testing::TempDir dir("lex");
  std::ofstream(dir.file("nouns.txt")) << "dog\ncat\n";
  std::ofstream(dir.file("adjectives.txt")) << "red\n";
  std::ofstream(dir.file("relations.txt")) << "on\n";
  EXPECT_EQ(code_of([&] { quality::Lexicons::load(dir.path()); }), cr::ErrorCode::kInvalidLexicon);
}

TEST(Classify, LexiconFirstThenSuffixes) {
  EXPECT_EQ(lex().classify("dog"), quality::Role::kNoun);
  EXPECT_EQ(lex().classify("dogs"), quality::Role::kNoun);
  EXPECT_EQ(lex().classify("puppies"), quality::Role::kNoun);
  EXPECT_EQ(lex().classify("jumping"), quality::Role::kRelation);
  EXPECT_EQ(lex().classify("wonderful"), quality::Role::kAdjective);
  EXPECT_EQ(lex().classify("celebration"), quality::Role::kNoun);
  EXPECT_EQ(lex().classify("quickly"), quality::Role::kNone);
  EXPECT_EQ(lex().classify("xyzzys"), quality::Role::kNone);
}

TEST(Extract, WorkedExamples) {
  EXPECT_TRUE(quality::extract_counts("A brown dog chases a ball", lex()).same_counts(2, 1, 1));
  EXPECT_TRUE(quality::extract_counts("Dog", lex()).same_counts(1, 0, 0));
  EXPECT_TRUE(quality::extract_counts("Quickly very", lex()).same_counts(0, 0, 0));
  EXPECT_EQ(code_of([] { quality::extract_counts("the a", lex()); }), cr::ErrorCode::kNoContentWords);
}

TEST(Extract, AdjacentRelationWordsFormOnePredicate) {
  EXPECT_TRUE(quality::extract_counts("a cat sitting on a mat", lex().with_noun("mat")).same_counts(2, 0, 1));
  EXPECT_TRUE(quality::extract_counts("a cat sitting near a dog on a mat", lex().with_noun("mat")).same_counts(3, 0, 2));
}

TEST(Extract, AttributeChainsThroughConjunctions) {
  EXPECT_TRUE(quality::extract_counts("black and white cows", lex()).same_counts(1, 2, 0));
  EXPECT_TRUE(quality::extract_counts("the dog is brown", lex()).same_counts(1, 0, 0));
}

TEST(Extract, MentionsListedForAudit) {
  const auto c = quality::extract_counts("A brown dog chases a ball", lex());
  ASSERT_EQ(c.mentions.size(), 4u);
  EXPECT_EQ(c.mentions[0], (quality::Mention{"brown", quality::Role::kAdjective}));
  EXPECT_EQ(c.mentions[2], (quality::Mention{"chases", quality::Role::kRelation}));
}

TEST(Extract, HandAnnotatedFixtureAgreement) {
  const auto fixture = quality::load_annotations(cr::testing::fixture("quality_fixture.jsonl"));
  ASSERT_EQ(fixture.size(), 25u);
  int agree = 0;
  std::string misses;
  for (const auto& a : fixture) {
    const auto c = quality::extract_counts(a.sentence, lex());
    if (c.same_counts(a.objects, a.attributes, a.relationships)) ++agree;
    else misses += a.sentence + "\n";
  }
  EXPECT_GE(agree, 23) << misses;
}

TEST(Extract, InvariantUnderOuterWhitespaceAndFinalPunctuation) {
  const auto fixture = quality::load_annotations(cr::testing::fixture("quality_fixture.jsonl"));
  for (const auto& a : fixture) {
    const auto base = quality::extract_counts(a.sentence, lex());
    for (const auto& variant : {"  " + a.sentence + "\t", a.sentence + "!", a.sentence + " .", "\n" + a.sentence + "?"}) {
      const auto v = quality::extract_counts(variant, lex());
      EXPECT_TRUE(v.same_counts(base.objects, base.attributes, base.relationships)) << variant;
    }
  }
}

TEST(Extract, MonotoneInNounLexiconAndBounded) {
  const std::vector<std::string> words{"a", "the", "blorp", "dog", "red", "on", "near", "zint", "riding", "cat",
                                       "and", "small", "quux", "tree", "with"};
  const auto failures = cr::testing::for_all(300, 8, [&](cr::Rng& rng) -> std::string {
    std::string s;
    const auto n = 1 + rng.index(10);
    for (std::size_t i = 0; i < n; ++i) s += cr::testing::pick(rng, words) + " ";
    s += "dog";
    const auto before = quality::extract_counts(s, lex());
    const auto after = quality::extract_counts(s, lex().with_noun(rng.bernoulli(0.5) ? "blorp" : "zint"));
    if (after.objects < before.objects) return "object count dropped for '" + s + "'";
    for (const auto& c : {before, after}) {
      const int bound = c.objects >= 2 ? c.objects * (c.objects - 1) : 0;
      if (c.relationships > bound) return "relationships above pairwise bound for '" + s + "'";
    }
    if (quality::extract_counts(s, lex()).mentions != before.mentions) return "not deterministic";
    return {};
  });
  EXPECT_TRUE(failures.empty()) << cr::testing::describe(failures);
}

TEST(CorpusMeans, Arithmetic) {
  const auto m = quality::corpus_means({"a dog and a cat", "a dog near a cat with a ball on a table"}, lex());
  EXPECT_DOUBLE_EQ(m.objects, 3.0);
  const auto single = quality::corpus_means({"A brown dog chases a ball"}, lex());
  EXPECT_DOUBLE_EQ(single.objects, 2.0);
  EXPECT_DOUBLE_EQ(single.attributes, 1.0);
  EXPECT_DOUBLE_EQ(single.relationships, 1.0);
  EXPECT_EQ(code_of([] { quality::corpus_means({}, lex()); }), cr::ErrorCode::kEmptyCorpus);
}

TEST(CompareSources, IdenticalCorporaGivePOne) {
  std::vector<std::string> corpus;
  for (const auto& a : quality::load_annotations(cr::testing::fixture("quality_fixture.jsonl")))
    corpus.push_back(a.sentence);
  const auto c = quality::compare_sources(corpus, corpus, lex());
  for (const auto& r : {c.objects, c.relationships, c.attributes}) {
    EXPECT_EQ(r.t_statistic, 0.0);
    EXPECT_NEAR(r.p_value, 1.0, 1e-9);
  }
}

TEST(CompareSources, WellSeparatedCorporaAreSignificant) {
  cr::Rng rng(31);
  const std::vector<std::string> nouns{"dog", "cat", "man", "tree", "ball", "car", "boat", "bench"};
  const std::vector<std::string> adjs{"red", "big", "old", "small", "wooden", "white"};
  std::vector<std::string> sparse, rich;
  for (int i = 0; i < 50; ++i) {
    sparse.push_back("a " + cr::testing::pick(rng, nouns) + (rng.bernoulli(0.3) ? " on the " + cr::testing::pick(rng, adjs) + " grass" : ""));
    std::string s = "a " + cr::testing::pick(rng, adjs) + " " + cr::testing::pick(rng, adjs) + " man riding a " +
                    cr::testing::pick(rng, adjs) + " horse near a " + cr::testing::pick(rng, adjs) + " tree with a dog";
    if (rng.bernoulli(0.5)) s += " on a " + cr::testing::pick(rng, adjs) + " field";
    rich.push_back(s);
  }
  const auto c = quality::compare_sources(sparse, rich, lex());
  const auto a = quality::corpus_samples(sparse, lex()), b = quality::corpus_samples(rich, lex());
  for (const auto& [r, xa, xb] : {std::tuple{c.objects, a.objects, b.objects},
                                  std::tuple{c.relationships, a.relationships, b.relationships},
                                  std::tuple{c.attributes, a.attributes, b.attributes}}) {
    EXPECT_LT(r.p_value, 0.001);
    EXPECT_LT(cr::oracle::permutation_p(xa, xb, 17, 20000), 0.001);
  }
}

TEST(CompareSources, NeedsTwoSentencesEach) {
  EXPECT_EQ(code_of([] { quality::compare_sources({"a dog"}, {"a dog", "a cat"}, lex()); }),
            cr::ErrorCode::kSampleTooSmall);
}

TEST(Report, TextLayoutShowsMeansAndRawP) {
  const auto c = quality::compare_sources({"a dog", "a dog near a cat"}, {"a red dog on a bench", "a cat"}, lex());
  const auto text = quality::comparison_text(c, "A", "B");
  EXPECT_NE(text.find("Objects"), std::string::npos);
  EXPECT_NE(text.find("P-values"), std::string::npos);
  const auto j = quality::comparison_json(c, "A", "B");
  EXPECT_EQ(j["a"]["n"], 2);
  EXPECT_TRUE(j["objects"].contains("p"));
}

TEST(Reference, ReportedMeansAreLabeledConstants) {
  EXPECT_EQ(quality::kReportedCrowdWorkers.n, 200);
  EXPECT_DOUBLE_EQ(quality::kReportedCrowdWorkers.objects, 2.30);
  EXPECT_DOUBLE_EQ(quality::kReportedGame.relationships, 1.88);
  EXPECT_DOUBLE_EQ(quality::kReportedGame.attributes, 1.45);
}
