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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "captionrace/error.hpp"
#include "captionrace/types.hpp"

namespace captionrace {

enum class GuessResult { kCorrect, kAlreadyRevealed, kMiss, kEmpty };

NLOHMANN_JSON_SERIALIZE_ENUM(GuessResult, {
                                              {GuessResult::kCorrect, "correct"},
                                              {GuessResult::kAlreadyRevealed, "already_revealed"},
                                              {GuessResult::kMiss, "miss"},
                                              {GuessResult::kEmpty, "empty"},
                                          })

struct GuessEntry {
  PlayerId player;
  std::string raw;
  TimePoint at;
  GuessResult result = GuessResult::kMiss;
  std::vector<std::size_t> positions;  // newly revealed, only for kCorrect

  friend bool operator==(const GuessEntry&, const GuessEntry&) = default;
};

/// One finished (not aborted) round. `blanks_remaining` is frozen at the
/// moment the round ended.
struct RoundRecord {
  std::string round_id;
  ImageId image_id;
  std::string raw_sentence;
  int content_norm_count = 0;
  int blanks_remaining = 0;
  bool sr_verified = false;
  std::vector<GuessEntry> guess_log;
  PlayerId leader_id;
  std::map<std::string, int> per_player_points;  // points earned this round
  TimePoint ended_at;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

inline void to_json(nlohmann::json& j, const GuessEntry& g) {
  j = {{"playerId", g.player},
       {"guess", g.raw},
       {"atMs", to_epoch_ms(g.at)},
       {"result", g.result},
       {"positions", g.positions}};
}

inline void from_json(const nlohmann::json& j, GuessEntry& g) {
  j.at("playerId").get_to(g.player);
  j.at("guess").get_to(g.raw);
  g.at = from_epoch_ms(j.at("atMs").get<std::int64_t>());
  j.at("result").get_to(g.result);
  g.positions = j.value("positions", std::vector<std::size_t>{});
}

inline void to_json(nlohmann::json& j, const RoundRecord& r) {
  j = {{"roundId", r.round_id},
       {"imageId", r.image_id},
       {"sentence", r.raw_sentence},
       {"contentNormCount", r.content_norm_count},
       {"blanksRemaining", r.blanks_remaining},
       {"srVerified", r.sr_verified},
       {"guessLog", r.guess_log},
       {"leaderId", r.leader_id},
       {"perPlayerPoints", r.per_player_points},
       {"endedAt", to_epoch_ms(r.ended_at)}};
}

inline void from_json(const nlohmann::json& j, RoundRecord& r) {
  j.at("roundId").get_to(r.round_id);
  j.at("imageId").get_to(r.image_id);
  j.at("sentence").get_to(r.raw_sentence);
  j.at("contentNormCount").get_to(r.content_norm_count);
  j.at("blanksRemaining").get_to(r.blanks_remaining);
  j.at("srVerified").get_to(r.sr_verified);
  r.guess_log = j.value("guessLog", std::vector<GuessEntry>{});
  j.at("leaderId").get_to(r.leader_id);
  r.per_player_points = j.value("perPlayerPoints", std::map<std::string, int>{});
  r.ended_at = from_epoch_ms(j.at("endedAt").get<std::int64_t>());
  if (r.blanks_remaining < 0 || r.blanks_remaining > r.content_norm_count)
    throw Error(ErrorCode::kParseError, "round " + r.round_id + ": blanksRemaining out of range");
}

}  // namespace captionrace
