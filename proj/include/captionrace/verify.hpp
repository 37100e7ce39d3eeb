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
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "captionrace/error.hpp"
#include "captionrace/lexic.hpp"
#include "captionrace/round_record.hpp"
#include "captionrace/types.hpp"

// Verification bookkeeping: the in-game rule, external majority votes and
// the blanks-versus-verified table.
namespace captionrace::verify {

struct VoteRecord {
  ImageId image_id;
  std::string sentence;
  std::vector<bool> votes;  // true = accurate description
  std::string source;

  friend bool operator==(const VoteRecord&, const VoteRecord&) = default;
};

inline void to_json(nlohmann::json& j, const VoteRecord& v) {
  j = {{"imageId", v.image_id}, {"sentence", v.sentence}, {"votes", v.votes}, {"source", v.source}};
}

inline void from_json(const nlohmann::json& j, VoteRecord& v) {
  j.at("imageId").get_to(v.image_id);
  j.at("sentence").get_to(v.sentence);
  j.at("votes").get_to(v.votes);
  v.source = j.value("source", std::string{});
  if (v.votes.empty()) throw Error(ErrorCode::kEmptyVotes, v.image_id.str());
}

/// Votes are matched to rounds on (image, sentence with outer whitespace trimmed).
using VoteKey = std::pair<ImageId, std::string>;
using VoteIndex = std::map<VoteKey, VoteRecord>;

inline VoteKey key_of(const ImageId& image, std::string_view sentence) {
  return {image, std::string(lexic::trim(sentence))};
}

/// In-game verification: every content word was guessed.
inline bool sr_verify(const RoundRecord& record) { return record.blanks_remaining == 0; }

/// Strict majority; for a three-person panel that is two or more yes votes.
inline bool majority_verify(const VoteRecord& vote) {
  if (vote.votes.empty()) throw Error(ErrorCode::kEmptyVotes, vote.image_id.str());
  const auto yes = std::count(vote.votes.begin(), vote.votes.end(), true);
  return yes * 2 > static_cast<std::ptrdiff_t>(vote.votes.size());
}

/// JSON Lines, one VoteRecord per line. Several lines for the same
/// (image, sentence) extend one panel.
inline VoteIndex parse_votes(std::istream& in, const std::string& origin = "<votes>") {
  VoteIndex index;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lexic::trim(line).empty()) continue;
    VoteRecord v;
    try {
      v = nlohmann::json::parse(line).get<VoteRecord>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
    auto key = key_of(v.image_id, v.sentence);
    auto [it, inserted] = index.try_emplace(key, v);
    if (!inserted) it->second.votes.insert(it->second.votes.end(), v.votes.begin(), v.votes.end());
  }
  return index;
}

inline std::vector<VoteRecord> parse_vote_list(std::istream& in, const std::string& origin = "<votes>") {
  std::vector<VoteRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lexic::trim(line).empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line).get<VoteRecord>());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

inline double round2(double pct) { return std::round(pct * 100.0) / 100.0; }

struct BucketRow {
  int blanks = 0;
  int sentence_count = 0;
  int verified_count = 0;
  double verified_pct = 0.0;  // rounded to 2 decimals

  friend bool operator==(const BucketRow&, const BucketRow&) = default;
};

struct ComparisonRow {
  std::string source;
  int sentence_count = 0;
  int verified_count = 0;
  double verified_pct = 0.0;

  friend bool operator==(const ComparisonRow&, const ComparisonRow&) = default;
};

struct BlanksBucketReport {
  std::vector<BucketRow> rows;  // descending by blanks
  std::vector<ComparisonRow> comparison_rows;
  int unvoted = 0;  // rounds without external votes, excluded from percentages
};

inline BlanksBucketReport build_blanks_report(const std::vector<RoundRecord>& records, const VoteIndex& votes,
                                              const std::vector<VoteRecord>& comparison) {
  BlanksBucketReport report;
  std::map<int, std::pair<int, int>, std::greater<>> buckets;
  for (const auto& r : records) {
    auto it = votes.find(key_of(r.image_id, r.raw_sentence));
    if (it == votes.end()) {
      ++report.unvoted;
      continue;
    }
    auto& [n, k] = buckets[r.blanks_remaining];
    ++n;
    if (majority_verify(it->second)) ++k;
  }
  for (const auto& [blanks, nk] : buckets)
    report.rows.push_back({blanks, nk.first, nk.second, round2(100.0 * nk.second / nk.first)});

  std::vector<std::string> order;
  std::map<std::string, std::pair<int, int>> by_source;
  for (const auto& v : comparison) {
    if (!by_source.count(v.source)) order.push_back(v.source);
    auto& [n, k] = by_source[v.source];
    ++n;
    if (majority_verify(v)) ++k;
  }
  for (const auto& s : order) {
    const auto [n, k] = by_source[s];
    report.comparison_rows.push_back({s, n, k, round2(100.0 * k / n)});
  }
  return report;
}

struct AgreementStats {
  std::optional<double> pct_majority_given_sr_verified;
  std::optional<double> pct_majority_given_not_sr_verified;
  int sr_verified_count = 0;
  int not_sr_verified_count = 0;
};

/// Conditional external-verification rates; a side with no rounds is absent.
inline AgreementStats agreement_stats(const std::vector<RoundRecord>& records, const VoteIndex& votes) {
  int n_yes = 0, k_yes = 0, n_no = 0, k_no = 0;
  for (const auto& r : records) {
    auto it = votes.find(key_of(r.image_id, r.raw_sentence));
    if (it == votes.end()) continue;
    const bool majority = majority_verify(it->second);
    if (sr_verify(r)) {
      ++n_yes;
      k_yes += majority;
    } else {
      ++n_no;
      k_no += majority;
    }
  }
  AgreementStats s;
  s.sr_verified_count = n_yes;
  s.not_sr_verified_count = n_no;
  if (n_yes > 0) s.pct_majority_given_sr_verified = 100.0 * k_yes / n_yes;
  if (n_no > 0) s.pct_majority_given_not_sr_verified = 100.0 * k_no / n_no;
  return s;
}

inline nlohmann::json report_json(const BlanksBucketReport& report, const AgreementStats& agreement) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"blanks", r.blanks}, {"sentences", r.sentence_count}, {"verified", r.verified_count},
                    {"verifiedPct", r.verified_pct}});
  nlohmann::json cmp = nlohmann::json::array();
  for (const auto& r : report.comparison_rows)
    cmp.push_back({{"source", r.source}, {"sentences", r.sentence_count}, {"verified", r.verified_count},
                   {"verifiedPct", r.verified_pct}});
  auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    return v ? nlohmann::json(round2(*v)) : nlohmann::json(nullptr);
  };
  return {{"rows", rows},
          {"comparison", cmp},
          {"unvoted", report.unvoted},
          {"agreement",
           {{"pctMajorityGivenSrVerified", opt(agreement.pct_majority_given_sr_verified)},
            {"pctMajorityGivenNotSrVerified", opt(agreement.pct_majority_given_not_sr_verified)}}}};
}

inline std::string format_pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

/// Aligned plain-text table: one row per blanks bucket, then one per
/// comparison source with "-" in the blanks column.
inline std::string to_text(const BlanksBucketReport& report, const std::string& game_label = "game") {
  std::ostringstream os;
  auto row = [&](const std::string& src, const std::string& blanks, int n, const std::string& pct) {
    os << std::left << std::setw(14) << src << std::right << std::setw(14) << blanks << std::setw(14) << n
       << std::setw(14) << pct << '\n';
  };
  os << std::left << std::setw(14) << "Source" << std::right << std::setw(14) << "Total Blanks" << std::setw(14)
     << "# Sentences" << std::setw(14) << "Verified (%)" << '\n';
  bool first = true;
  for (const auto& r : report.rows) {
    row(first ? game_label : "", std::to_string(r.blanks), r.sentence_count, format_pct(r.verified_pct));
    first = false;
  }
  for (const auto& c : report.comparison_rows) row(c.source, "-", c.sentence_count, format_pct(c.verified_pct));
  if (report.unvoted > 0) os << "(" << report.unvoted << " rounds without votes excluded)\n";
  return os.str();
}

}  // namespace captionrace::verify
