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
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "captionrace/corpus.hpp"
#include "captionrace/error.hpp"
#include "captionrace/lexic.hpp"
#include "captionrace/round_record.hpp"
#include "captionrace/types.hpp"

// Per-room game state machine. Time is always injected through `now`;
// nothing in here reads a clock, so a round replays bit-for-bit.
namespace captionrace::engine {

struct GameConfig {
  int min_players = 3;
  int round_duration_sec = 60;
  int points_per_word = 10;  // awarded to the guesser and to the leader
  int sentence_timeout_sec = 45;
  int max_sentence_content_words = 20;

  void validate() const {
    auto positive = [](int v, const char* name) {
      if (v <= 0) throw Error(ErrorCode::kInvalidConfig, std::string(name) + " must be positive");
    };
    positive(round_duration_sec, "roundDurationSec");
    positive(points_per_word, "pointsPerWord");
    positive(sentence_timeout_sec, "sentenceTimeoutSec");
    positive(max_sentence_content_words, "maxSentenceContentWords");
    if (min_players < 3) throw Error(ErrorCode::kInvalidConfig, "minPlayers must be at least 3");
  }

  Duration round_duration() const { return std::chrono::seconds(round_duration_sec); }
  Duration sentence_timeout() const { return std::chrono::seconds(sentence_timeout_sec); }

  /// Applies a JSON object of overrides (camelCase keys) and validates.
  GameConfig merged(const nlohmann::json& overrides) const {
    GameConfig out = *this;
    if (overrides.is_null()) return out;
    if (!overrides.is_object()) throw Error(ErrorCode::kInvalidConfig, "config overrides must be an object");
    for (const auto& [key, value] : overrides.items()) {
      if (!value.is_number_integer()) throw Error(ErrorCode::kInvalidConfig, key + " must be an integer");
      const int v = value.get<int>();
      if (key == "minPlayers") out.min_players = v;
      else if (key == "roundDurationSec") out.round_duration_sec = v;
      else if (key == "pointsPerWord") out.points_per_word = v;
      else if (key == "sentenceTimeoutSec") out.sentence_timeout_sec = v;
      else if (key == "maxSentenceContentWords") out.max_sentence_content_words = v;
      else throw Error(ErrorCode::kInvalidConfig, "unknown config key " + key);
    }
    out.validate();
    return out;
  }

  friend bool operator==(const GameConfig&, const GameConfig&) = default;
};

inline void to_json(nlohmann::json& j, const GameConfig& c) {
  j = {{"minPlayers", c.min_players},
       {"roundDurationSec", c.round_duration_sec},
       {"pointsPerWord", c.points_per_word},
       {"sentenceTimeoutSec", c.sentence_timeout_sec},
       {"maxSentenceContentWords", c.max_sentence_content_words}};
}

struct Player {
  PlayerId id;
  std::string display_name;
  int score = 0;
  bool connected = true;
};

enum class MaskStatus { kStopRevealed, kHidden, kRevealed };

inline std::string_view to_string(MaskStatus s) {
  switch (s) {
    case MaskStatus::kStopRevealed: return "stop";
    case MaskStatus::kHidden: return "hidden";
    case MaskStatus::kRevealed: return "revealed";
  }
  return "hidden";
}

/// Tokenized sentence with per-position visibility. A content word is
/// revealed everywhere it occurs or nowhere; blanks are counted as unique
/// hidden norms, not positions.
class MaskedSentence {
 public:
  explicit MaskedSentence(std::vector<lexic::Token> tokens) : tokens_(std::move(tokens)) {
    status_.reserve(tokens_.size());
    for (const auto& t : tokens_) {
      if (t.is_content()) {
        status_.push_back(MaskStatus::kHidden);
        hidden_.insert(t.norm);
      } else {
        status_.push_back(MaskStatus::kStopRevealed);
      }
    }
    content_norms_ = static_cast<int>(hidden_.size());
  }

  const std::vector<lexic::Token>& tokens() const noexcept { return tokens_; }
  const std::vector<MaskStatus>& status() const noexcept { return status_; }
  MaskStatus status(std::size_t pos) const { return status_.at(pos); }
  int blanks_remaining() const noexcept { return static_cast<int>(hidden_.size()); }
  int content_norm_count() const noexcept { return content_norms_; }
  const std::set<std::string, std::less<>>& hidden_norms() const noexcept { return hidden_; }
  bool is_hidden(std::string_view norm) const { return hidden_.find(norm) != hidden_.end(); }

  /// Reveals every position holding `norm`. Returns the positions that
  /// changed, empty if the norm was not hidden.
  std::vector<std::size_t> reveal(std::string_view norm) {
    std::vector<std::size_t> changed;
    auto it = hidden_.find(norm);
    if (it == hidden_.end()) return changed;
    hidden_.erase(it);
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (status_[i] == MaskStatus::kHidden && tokens_[i].norm == norm) {
        status_[i] = MaskStatus::kRevealed;
        changed.push_back(i);
      }
    }
    return changed;
  }

 private:
  std::vector<lexic::Token> tokens_;
  std::vector<MaskStatus> status_;
  std::set<std::string, std::less<>> hidden_;
  int content_norms_ = 0;
};

enum class Phase { kAwaitingSentence, kGuessing, kEnded };

inline std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::kAwaitingSentence: return "awaiting_sentence";
    case Phase::kGuessing: return "guessing";
    case Phase::kEnded: return "ended";
  }
  return "ended";
}

enum class AbortReason { kLeaderLeft, kUnderPopulated, kSentenceTimeout };

inline std::string_view to_string(AbortReason r) {
  switch (r) {
    case AbortReason::kLeaderLeft: return "leader_left";
    case AbortReason::kUnderPopulated: return "not_enough_players";
    case AbortReason::kSentenceTimeout: return "sentence_timeout";
  }
  return "aborted";
}

struct RoundState {
  std::string round_id;
  ImageId image_id;
  std::string image_locator;
  PlayerId leader;
  std::optional<MaskedSentence> sentence;
  std::string raw_sentence;
  Phase phase = Phase::kAwaitingSentence;
  TimePoint started_at;
  TimePoint sentence_deadline;
  std::optional<TimePoint> deadline;  // set on entering kGuessing
  std::vector<GuessEntry> guess_log;
  std::map<std::string, int> points;  // earned this round

  bool active() const noexcept { return phase != Phase::kEnded; }
};

struct GuessOutcome {
  GuessResult result = GuessResult::kMiss;
  std::string norm;  // normalized guess, empty for kEmpty
  std::vector<std::size_t> revealed_positions;
  int points_awarded = 0;  // to the guesser; the leader gets the same

  bool already_revealed() const noexcept { return result == GuessResult::kAlreadyRevealed; }
  bool correct() const noexcept { return result == GuessResult::kCorrect; }
};

struct TickResult {
  std::optional<RoundRecord> record;
  std::optional<AbortReason> aborted;
};

class Game {
 public:
  Game(GameConfig config, std::shared_ptr<const lexic::StopWordList> stops, std::string round_prefix = "r")
      : config_(config), stops_(std::move(stops)), round_prefix_(std::move(round_prefix)) {
    config_.validate();
    if (!stops_) stops_ = std::shared_ptr<const lexic::StopWordList>(&lexic::StopWordList::builtin(), [](auto*) {});
  }

  const GameConfig& config() const noexcept { return config_; }
  const lexic::StopWordList& stop_words() const noexcept { return *stops_; }
  const std::vector<Player>& players() const noexcept { return players_; }
  const std::deque<PlayerId>& rotation() const noexcept { return rotation_; }
  const std::vector<RoundRecord>& history() const noexcept { return history_; }
  const RoundState* round() const noexcept { return round_ ? &*round_ : nullptr; }
  bool round_active() const noexcept { return round_ && round_->active(); }

  const Player* find_player(const PlayerId& id) const {
    auto it = std::find_if(players_.begin(), players_.end(), [&](const Player& p) { return p.id == id; });
    return it == players_.end() ? nullptr : &*it;
  }

  int connected_count() const {
    return static_cast<int>(std::count_if(players_.begin(), players_.end(), [](const Player& p) { return p.connected; }));
  }

  /// Late joiners go to the rotation tail and may guess in the current round.
  const Player& add_player(PlayerId id, std::string display_name) {
    if (find_player(id)) throw Error(ErrorCode::kDuplicatePlayer, id.str());
    players_.push_back(Player{id, std::move(display_name), 0, true});
    rotation_.push_back(id);
    if (round_active()) round_->points.emplace(id.str(), 0);
    return players_.back();
  }

  std::optional<AbortReason> remove_player(const PlayerId& id) {
    auto it = std::find_if(players_.begin(), players_.end(), [&](const Player& p) { return p.id == id; });
    if (it == players_.end()) throw Error(ErrorCode::kUnknownPlayer, id.str());
    players_.erase(it);
    rotation_.erase(std::remove(rotation_.begin(), rotation_.end(), id), rotation_.end());
    return check_abort_after_departure(id);
  }

  /// Disconnected players keep their seat and score but are skipped by the
  /// rotation and do not count towards minPlayers.
  std::optional<AbortReason> set_connected(const PlayerId& id, bool connected) {
    Player& p = mutable_player(id);
    if (p.connected == connected) return std::nullopt;
    p.connected = connected;
    if (connected) return std::nullopt;
    return check_abort_after_departure(id);
  }

  const RoundState& start_round(const CorpusImage& image, TimePoint now) {
    if (round_active()) throw Error(ErrorCode::kRoundInProgress);
    if (connected_count() < config_.min_players)
      throw Error(ErrorCode::kNotEnoughPlayers,
                  std::to_string(connected_count()) + " connected, need " + std::to_string(config_.min_players));

    // Skip disconnected seats without changing their relative order.
    for (std::size_t i = 0; i < rotation_.size() && !find_player(rotation_.front())->connected; ++i) {
      rotation_.push_back(rotation_.front());
      rotation_.pop_front();
    }
    PlayerId leader = rotation_.front();
    rotation_.pop_front();
    rotation_.push_back(leader);

    RoundState r;
    r.round_id = round_prefix_ + std::to_string(++round_counter_);
    r.image_id = image.id;
    r.image_locator = image.locator;
    r.leader = std::move(leader);
    r.started_at = now;
    r.sentence_deadline = now + config_.sentence_timeout();
    for (const auto& p : players_) r.points.emplace(p.id.str(), 0);
    round_ = std::move(r);
    return *round_;
  }

  const MaskedSentence& set_sentence(const PlayerId& caller, std::string_view text, TimePoint now) {
    if (!round_active()) throw Error(ErrorCode::kWrongPhase, "no round in progress");
    if (caller != round_->leader) throw Error(ErrorCode::kNotLeader, caller.str());
    if (round_->phase != Phase::kAwaitingSentence || now >= round_->sentence_deadline)
      throw Error(ErrorCode::kWrongPhase, "sentence entry is closed");

    auto tokens = lexic::tokenize(text, *stops_);
    const auto content = std::count_if(tokens.begin(), tokens.end(), [](const auto& t) { return t.is_content(); });
    if (content > config_.max_sentence_content_words)
      throw Error(ErrorCode::kTooLong, std::to_string(content) + " content words, limit " +
                                           std::to_string(config_.max_sentence_content_words));

    round_->sentence.emplace(std::move(tokens));
    round_->raw_sentence = std::string(lexic::trim(text));
    round_->phase = Phase::kGuessing;
    round_->deadline = now + config_.round_duration();
    return *round_->sentence;
  }

  GuessOutcome submit_guess(const PlayerId& guesser, std::string_view guess, TimePoint now) {
    if (!round_active() || round_->phase != Phase::kGuessing) throw Error(ErrorCode::kRoundNotActive);
    if (!find_player(guesser)) throw Error(ErrorCode::kUnknownPlayer, guesser.str());
    if (guesser == round_->leader) throw Error(ErrorCode::kLeaderCannotGuess);
    if (now >= *round_->deadline) throw Error(ErrorCode::kDeadlinePassed);

    GuessOutcome out;
    auto& mask = *round_->sentence;
    const lexic::Token* hit = nullptr;
    for (const auto& t : mask.tokens()) {
      if (!t.is_content()) continue;
      const auto m = lexic::matches(guess, t);
      if (m.empty_guess) {
        out.result = GuessResult::kEmpty;
        break;
      }
      if (m.matched) {
        hit = &t;
        break;
      }
    }

    if (hit) {
      out.norm = hit->norm;
      if (mask.is_hidden(hit->norm)) {
        out.result = GuessResult::kCorrect;
        out.revealed_positions = mask.reveal(hit->norm);
        out.points_awarded = config_.points_per_word;
        award(guesser, out.points_awarded);
        award(round_->leader, out.points_awarded);
      } else {
        out.result = GuessResult::kAlreadyRevealed;
      }
    } else if (out.result != GuessResult::kEmpty) {
      out.result = GuessResult::kMiss;
      out.norm = lexic::try_normalize(lexic::trim(guess)).value_or("");
    }

    round_->guess_log.push_back(GuessEntry{guesser, std::string(guess), now, out.result, out.revealed_positions});
    return out;
  }

  /// Ends the round on deadline or when nothing is left to guess, and aborts
  /// a round whose leader never set a sentence.
  TickResult tick(TimePoint now) {
    TickResult out;
    if (!round_active()) return out;
    if (round_->phase == Phase::kAwaitingSentence) {
      if (now >= round_->sentence_deadline) out.aborted = abort(AbortReason::kSentenceTimeout);
      return out;
    }
    const auto& mask = *round_->sentence;
    if (now < *round_->deadline && mask.blanks_remaining() > 0) return out;

    round_->phase = Phase::kEnded;
    RoundRecord rec;
    rec.round_id = round_->round_id;
    rec.image_id = round_->image_id;
    rec.raw_sentence = round_->raw_sentence;
    rec.content_norm_count = mask.content_norm_count();
    rec.blanks_remaining = mask.blanks_remaining();
    rec.sr_verified = rec.blanks_remaining == 0;
    rec.guess_log = round_->guess_log;
    rec.leader_id = round_->leader;
    rec.per_player_points = round_->points;
    rec.ended_at = now;
    history_.push_back(rec);
    out.record = std::move(rec);
    return out;
  }

 private:
  Player& mutable_player(const PlayerId& id) {
    auto it = std::find_if(players_.begin(), players_.end(), [&](const Player& p) { return p.id == id; });
    if (it == players_.end()) throw Error(ErrorCode::kUnknownPlayer, id.str());
    return *it;
  }

  void award(const PlayerId& id, int points) {
    round_->points[id.str()] += points;
    if (auto it = std::find_if(players_.begin(), players_.end(), [&](const Player& p) { return p.id == id; });
        it != players_.end())
      it->score += points;
  }

  std::optional<AbortReason> check_abort_after_departure(const PlayerId& id) {
    if (!round_active()) return std::nullopt;
    if (id == round_->leader) return abort(AbortReason::kLeaderLeft);
    if (connected_count() < config_.min_players) return abort(AbortReason::kUnderPopulated);
    return std::nullopt;
  }

  // Aborted rounds leave no record; they verify nothing about a sentence.
  AbortReason abort(AbortReason reason) {
    round_.reset();
    return reason;
  }

  GameConfig config_;
  std::shared_ptr<const lexic::StopWordList> stops_;
  std::string round_prefix_;
  std::uint64_t round_counter_ = 0;
  std::vector<Player> players_;
  std::deque<PlayerId> rotation_;
  std::optional<RoundState> round_;
  std::vector<RoundRecord> history_;
};

}  // namespace captionrace::engine
