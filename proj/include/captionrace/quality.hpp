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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "captionrace/error.hpp"
#include "captionrace/lexic.hpp"
#include "captionrace/stats.hpp"

// Scene-graph-lite caption quality: objects, attributes and pairwise
// relationships counted by a lexicon + positional-pattern extractor.
namespace captionrace::quality {

enum class Role { kNone, kNoun, kAdjective, kRelation };

inline std::string_view to_string(Role r) {
  switch (r) {
    case Role::kNone: return "none";
    case Role::kNoun: return "object";
    case Role::kAdjective: return "attribute";
    case Role::kRelation: return "relation";
  }
  return "none";
}

/// Fallback classification by word shape, tried in order after the lexicon
/// misses. A rule with `noun_stem` set only fires when replacing the suffix
/// yields a lexicon noun (plural folding for object detection).
struct SuffixRule {
  std::string suffix;
  Role role = Role::kNone;
  std::optional<std::string> noun_stem;
};

inline std::vector<SuffixRule> default_suffix_rules() {
  return {
      {"ies", Role::kNoun, "y"},  {"es", Role::kNoun, ""},   {"s", Role::kNoun, ""},
      {"ly", Role::kNone, {}},    {"ing", Role::kRelation, {}},
      {"ful", Role::kAdjective, {}}, {"ous", Role::kAdjective, {}}, {"ive", Role::kAdjective, {}},
      {"less", Role::kAdjective, {}}, {"able", Role::kAdjective, {}}, {"ible", Role::kAdjective, {}},
      {"ish", Role::kAdjective, {}},
      {"tion", Role::kNoun, {}},  {"sion", Role::kNoun, {}}, {"ment", Role::kNoun, {}},
      {"ness", Role::kNoun, {}},  {"ity", Role::kNoun, {}},  {"ship", Role::kNoun, {}},
  };
}

using WordSet = std::set<std::string, std::less<>>;

class Lexicons {
 public:
  static constexpr std::size_t kMinNouns = 200;
  static constexpr std::size_t kMinAdjectives = 80;
  static constexpr std::size_t kMinRelations = 40;

  Lexicons(WordSet nouns, WordSet adjectives, WordSet relations,
           std::vector<SuffixRule> rules = default_suffix_rules())
      : nouns_(normalized(nouns)),
        adjectives_(normalized(adjectives)),
        relations_(normalized(relations)),
        rules_(std::move(rules)) {
    check_disjoint(nouns_, adjectives_, "nouns", "adjectives");
    check_disjoint(nouns_, relations_, "nouns", "relations");
    check_disjoint(adjectives_, relations_, "adjectives", "relations");
  }

  /// Loads nouns.txt, adjectives.txt and relations.txt from `dir`.
  static Lexicons load(const std::filesystem::path& dir) {
    Lexicons lex(read_words(dir / "nouns.txt"), read_words(dir / "adjectives.txt"),
                 read_words(dir / "relations.txt"));
    auto need = [&](const WordSet& s, std::size_t n, const char* what) {
      if (s.size() < n)
        throw Error(ErrorCode::kInvalidLexicon,
                    std::string(what) + ": " + std::to_string(s.size()) + " entries, need " + std::to_string(n));
    };
    need(lex.nouns_, kMinNouns, "nouns");
    need(lex.adjectives_, kMinAdjectives, "adjectives");
    need(lex.relations_, kMinRelations, "relations");
    return lex;
  }

  const WordSet& nouns() const noexcept { return nouns_; }
  const WordSet& adjectives() const noexcept { return adjectives_; }
  const WordSet& relations() const noexcept { return relations_; }

  Role lookup(std::string_view norm) const {
    if (nouns_.count(norm)) return Role::kNoun;
    if (adjectives_.count(norm)) return Role::kAdjective;
    if (relations_.count(norm)) return Role::kRelation;
    return Role::kNone;
  }

  /// Lexicon hit first, then the first matching suffix rule.
  Role classify(std::string_view norm) const {
    if (auto r = lookup(norm); r != Role::kNone) return r;
    for (const auto& rule : rules_) {
      if (norm.size() <= rule.suffix.size() || !norm.ends_with(rule.suffix)) continue;
      if (rule.noun_stem) {
        std::string stem(norm.substr(0, norm.size() - rule.suffix.size()));
        stem += *rule.noun_stem;
        if (nouns_.count(stem)) return Role::kNoun;
        continue;
      }
      return rule.role;
    }
    return Role::kNone;
  }

  Lexicons with_noun(std::string word) const {
    Lexicons copy = *this;
    copy.nouns_.insert(lexic::normalize(word));
    check_disjoint(copy.nouns_, copy.adjectives_, "nouns", "adjectives");
    check_disjoint(copy.nouns_, copy.relations_, "nouns", "relations");
    return copy;
  }

 private:
  static WordSet normalized(const WordSet& in) {
    WordSet out;
    for (const auto& w : in)
      if (auto n = lexic::try_normalize(lexic::trim(w))) out.insert(*n);
    return out;
  }

  static WordSet read_words(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIo, "cannot open lexicon " + path.string());
    WordSet words;
    std::string line;
    while (std::getline(in, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      for (auto span : lexic::split_whitespace(line)) words.insert(std::string(span));
    }
    return words;
  }

  static void check_disjoint(const WordSet& a, const WordSet& b, const char* an, const char* bn) {
    for (const auto& w : a)
      if (b.count(w)) throw Error(ErrorCode::kInvalidLexicon, "'" + w + "' is in both " + an + " and " + bn);
  }

  WordSet nouns_;
  WordSet adjectives_;
  WordSet relations_;
  std::vector<SuffixRule> rules_;
};

struct Mention {
  std::string norm;
  Role role = Role::kNone;
  friend bool operator==(const Mention&, const Mention&) = default;
};

struct QualityCounts {
  int objects = 0;
  int attributes = 0;
  int relationships = 0;
  std::vector<Mention> mentions;

  bool same_counts(int o, int a, int r) const { return objects == o && attributes == a && relationships == r; }
};

namespace detail {

// Stop words that end an adjective chain: an adjective only modifies a noun
// reached through other adjectives and plain conjunctions.
inline bool continues_chain(std::string_view stop_norm) { return stop_norm == "and" || stop_norm == "or"; }

}  // namespace detail

inline QualityCounts extract_counts(std::string_view sentence, const Lexicons& lex,
                                    const lexic::StopWordList& stops = lexic::StopWordList::builtin()) {
  const auto tokens = lexic::tokenize(sentence, stops);

  std::vector<Role> roles(tokens.size(), Role::kNone);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    // Stop words can still be spatial relations ("on", "near").
    roles[i] = t.is_content() ? lex.classify(t.norm)
                              : (lex.relations().count(t.norm) ? Role::kRelation : Role::kNone);
  }

  QualityCounts out;
  std::set<std::string> objects;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (roles[i] != Role::kNone) out.mentions.push_back({tokens[i].norm, roles[i]});
    if (roles[i] == Role::kNoun) objects.insert(tokens[i].norm);
  }
  out.objects = static_cast<int>(objects.size());

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!tokens[i].is_content() || roles[i] != Role::kAdjective) continue;
    for (std::size_t j = i + 1; j < tokens.size(); ++j) {
      if (!tokens[j].is_content()) {
        if (detail::continues_chain(tokens[j].norm)) continue;
        break;
      }
      if (roles[j] == Role::kNoun) {
        ++out.attributes;
        break;
      }
      if (roles[j] != Role::kAdjective) break;
    }
  }

  std::vector<std::size_t> noun_positions;
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (roles[i] == Role::kNoun) noun_positions.push_back(i);
  if (!noun_positions.empty()) {
    // A run of adjacent relation words ("sitting on") is one predicate.
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (roles[i] != Role::kRelation) continue;
      std::size_t end = i;
      while (end + 1 < tokens.size() && roles[end + 1] == Role::kRelation) ++end;
      if (noun_positions.front() < i && noun_positions.back() > end) ++out.relationships;
      i = end;
    }
  }
  const int bound = out.objects >= 2 ? out.objects * (out.objects - 1) : 0;
  out.relationships = std::min(out.relationships, bound);
  return out;
}

struct CorpusMeans {
  double objects = 0.0;
  double relationships = 0.0;
  double attributes = 0.0;
};

struct CorpusSamples {
  std::vector<double> objects;
  std::vector<double> relationships;
  std::vector<double> attributes;
};

inline CorpusSamples corpus_samples(const std::vector<std::string>& sentences, const Lexicons& lex,
                                    const lexic::StopWordList& stops = lexic::StopWordList::builtin()) {
  CorpusSamples s;
  for (const auto& sentence : sentences) {
    const auto c = extract_counts(sentence, lex, stops);
    s.objects.push_back(c.objects);
    s.relationships.push_back(c.relationships);
    s.attributes.push_back(c.attributes);
  }
  return s;
}

inline CorpusMeans corpus_means(const std::vector<std::string>& sentences, const Lexicons& lex,
                                const lexic::StopWordList& stops = lexic::StopWordList::builtin()) {
  if (sentences.empty()) throw Error(ErrorCode::kEmptyCorpus);
  const auto s = corpus_samples(sentences, lex, stops);
  return {stats::mean(s.objects), stats::mean(s.relationships), stats::mean(s.attributes)};
}

struct SourceComparison {
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  stats::TTestResult objects;
  stats::TTestResult relationships;
  stats::TTestResult attributes;
};

inline SourceComparison compare_sources(const std::vector<std::string>& corpus_a,
                                        const std::vector<std::string>& corpus_b, const Lexicons& lex,
                                        const lexic::StopWordList& stops = lexic::StopWordList::builtin()) {
  if (corpus_a.size() < 2 || corpus_b.size() < 2)
    throw Error(ErrorCode::kSampleTooSmall, "each corpus needs at least 2 sentences");
  const auto a = corpus_samples(corpus_a, lex, stops);
  const auto b = corpus_samples(corpus_b, lex, stops);
  return {corpus_a.size(), corpus_b.size(), stats::welch_t_test(a.objects, b.objects),
          stats::welch_t_test(a.relationships, b.relationships), stats::welch_t_test(a.attributes, b.attributes)};
}

/// Per-sentence means reported for the original human-collected corpora.
/// They need those corpora to recompute and are shown for reference only.
struct ReportedMeans {
  const char* label;
  int n;
  double objects;
  double relationships;
  double attributes;
};
inline constexpr ReportedMeans kReportedCrowdWorkers{"AMT", 200, 2.30, 1.02, 1.17};
inline constexpr ReportedMeans kReportedGame{"game", 49, 2.98, 1.88, 1.45};

inline nlohmann::json comparison_json(const SourceComparison& c, const std::string& label_a,
                                      const std::string& label_b) {
  auto metric = [](const stats::TTestResult& r) {
    return nlohmann::json{{"meanA", r.mean_a},
                          {"meanB", r.mean_b},
                          {"t", r.t_statistic},
                          {"df", r.degrees_of_freedom},
                          {"p", r.p_value}};
  };
  return {{"a", {{"label", label_a}, {"n", c.n_a}}},
          {"b", {{"label", label_b}, {"n", c.n_b}}},
          {"objects", metric(c.objects)},
          {"relationships", metric(c.relationships)},
          {"attributes", metric(c.attributes)}};
}

/// Plain-text table: means per source, then raw two-sided p-values.
inline std::string comparison_text(const SourceComparison& c, const std::string& label_a,
                                   const std::string& label_b) {
  std::ostringstream os;
  auto num = [](double v, const char* fmt) {
    char buf[32];
    std::snprintf(buf, sizeof buf, fmt, v);
    return std::string(buf);
  };
  const std::string la = label_a + " (n=" + std::to_string(c.n_a) + ")";
  const std::string lb = label_b + " (n=" + std::to_string(c.n_b) + ")";
  const int w0 = static_cast<int>(std::max({la.size(), lb.size(), std::size_t{8}})) + 2;
  os << std::left << std::setw(w0) << "" << std::right << std::setw(10) << "Objects" << std::setw(15)
     << "Relationships" << std::setw(12) << "Attributes" << '\n';
  os << std::left << std::setw(w0) << la << std::right << std::setw(10) << num(c.objects.mean_a, "%.2f")
     << std::setw(15) << num(c.relationships.mean_a, "%.2f") << std::setw(12) << num(c.attributes.mean_a, "%.2f")
     << '\n';
  os << std::left << std::setw(w0) << lb << std::right << std::setw(10) << num(c.objects.mean_b, "%.2f")
     << std::setw(15) << num(c.relationships.mean_b, "%.2f") << std::setw(12) << num(c.attributes.mean_b, "%.2f")
     << '\n';
  os << std::left << std::setw(w0) << "P-values" << std::right << std::setw(10) << num(c.objects.p_value, "%.4g")
     << std::setw(15) << num(c.relationships.p_value, "%.4g") << std::setw(12)
     << num(c.attributes.p_value, "%.4g") << '\n';
  return os.str();
}

struct AnnotatedSentence {
  std::string sentence;
  int objects = 0;
  int attributes = 0;
  int relationships = 0;
};

/// JSON Lines: {"sentence", "objects", "attributes", "relationships"}.
inline std::vector<AnnotatedSentence> load_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::vector<AnnotatedSentence> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lexic::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back({j.at("sentence").get<std::string>(), j.at("objects").get<int>(), j.at("attributes").get<int>(),
                     j.at("relationships").get<int>()});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace captionrace::quality
