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

#include <stdexcept>
#include <string>
#include <string_view>

namespace captionrace {

enum class ErrorCode {
  // lexic
  kEmptyAfterNormalization,
  kNoContentWords,
  // engine
  kNotEnoughPlayers,
  kRoundInProgress,
  kNotLeader,
  kWrongPhase,
  kTooLong,
  kLeaderCannotGuess,
  kRoundNotActive,
  kDeadlinePassed,
  kUnknownPlayer,
  kDuplicatePlayer,
  kInvalidConfig,
  // verify
  kEmptyVotes,
  // quality / stats
  kEmptyCorpus,
  kSampleTooSmall,
  kZeroVarianceBoth,
  kInvalidLexicon,
  // server
  kCapacity,
  kLeaderMuted,
  kUnauthenticated,
  kBadMessage,
  kUnknownRoom,
  kStorageFailure,
  kParseError,
  kDuplicateImageId,
  // simharness
  kCorpusWithoutTags,
  kInsufficientSpread,
  kIo,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyAfterNormalization: return "EMPTY_AFTER_NORMALIZATION";
    case ErrorCode::kNoContentWords: return "NO_CONTENT_WORDS";
    case ErrorCode::kNotEnoughPlayers: return "NOT_ENOUGH_PLAYERS";
    case ErrorCode::kRoundInProgress: return "ROUND_IN_PROGRESS";
    case ErrorCode::kNotLeader: return "NOT_LEADER";
    case ErrorCode::kWrongPhase: return "WRONG_PHASE";
    case ErrorCode::kTooLong: return "TOO_LONG";
    case ErrorCode::kLeaderCannotGuess: return "LEADER_CANNOT_GUESS";
    case ErrorCode::kRoundNotActive: return "ROUND_NOT_ACTIVE";
    case ErrorCode::kDeadlinePassed: return "DEADLINE_PASSED";
    case ErrorCode::kUnknownPlayer: return "UNKNOWN_PLAYER";
    case ErrorCode::kDuplicatePlayer: return "DUPLICATE_PLAYER";
    case ErrorCode::kInvalidConfig: return "INVALID_CONFIG";
    case ErrorCode::kEmptyVotes: return "EMPTY_VOTES";
    case ErrorCode::kEmptyCorpus: return "EMPTY_CORPUS";
    case ErrorCode::kSampleTooSmall: return "SAMPLE_TOO_SMALL";
    case ErrorCode::kZeroVarianceBoth: return "ZERO_VARIANCE_BOTH";
    case ErrorCode::kInvalidLexicon: return "INVALID_LEXICON";
    case ErrorCode::kCapacity: return "CAPACITY";
    case ErrorCode::kLeaderMuted: return "LEADER_MUTED";
    case ErrorCode::kUnauthenticated: return "UNAUTHENTICATED";
    case ErrorCode::kBadMessage: return "BAD_MESSAGE";
    case ErrorCode::kUnknownRoom: return "UNKNOWN_ROOM";
    case ErrorCode::kStorageFailure: return "STORAGE_FAILURE";
    case ErrorCode::kParseError: return "PARSE_ERROR";
    case ErrorCode::kDuplicateImageId: return "DUPLICATE_IMAGE_ID";
    case ErrorCode::kCorpusWithoutTags: return "CORPUS_WITHOUT_TAGS";
    case ErrorCode::kInsufficientSpread: return "INSUFFICIENT_SPREAD";
    case ErrorCode::kIo: return "IO_ERROR";
  }
  return "UNKNOWN";
}

/// Every failure in the library is reported as an Error carrying a stable
/// code; the wire protocol forwards `to_string(code())` verbatim.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}
  explicit Error(ErrorCode code) : std::runtime_error(std::string(to_string(code))), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace captionrace
