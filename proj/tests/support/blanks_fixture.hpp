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

#include <fstream>
#include <string>
#include <vector>

#include "captionrace/verify.hpp"
#include "support/paths.hpp"

// The shipped blanks-vs-verification fixture and the published values it
// approximates.
namespace captionrace::testing {

struct PublishedRow {
  int blanks;
  int sentences;
  double pct;
};

// Bucket sizes and verified percentages as printed.
inline const std::vector<PublishedRow>& published_rows() {
  static const std::vector<PublishedRow> rows{{4, 7, 42.80}, {3, 12, 50.00}, {2, 9, 33.30}, {1, 12, 75.00}, {0, 49, 87.80}};
  return rows;
}
inline constexpr int kPublishedComparisonSentences = 200;
inline constexpr double kPublishedComparisonPct = 85.50;
inline constexpr double kPublishedAgreementVerified = 87.8;
inline constexpr double kPublishedAgreementNotVerified = 54.9;

struct BlanksFixture {
  std::vector<RoundRecord> records;
  verify::VoteIndex votes;
  std::vector<verify::VoteRecord> comparison;
};

inline std::vector<RoundRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  std::vector<RoundRecord> out;
  std::string line;
  while (std::getline(in, line))
    if (!lexic::trim(line).empty()) out.push_back(nlohmann::json::parse(line).get<RoundRecord>());
  return out;
}

inline BlanksFixture load_blanks_fixture() {
  BlanksFixture f;
  f.records = read_records(fixture("blanks_records.jsonl"));
  std::ifstream votes(fixture("blanks_votes.jsonl"));
  f.votes = verify::parse_votes(votes);
  std::ifstream cmp(fixture("blanks_comparison.jsonl"));
  f.comparison = verify::parse_vote_list(cmp);
  return f;
}

}  // namespace captionrace::testing
