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
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "captionrace/error.hpp"
#include "captionrace/store.hpp"

// JSON envelope {"type": "...", "seq": n, "payload": {...}} carried in
// WebSocket text frames. Payload schemas are listed in docs/protocol.md.
namespace captionrace::protocol {

inline constexpr int kProtocolVersion = 1;

enum class MessageType {
  kJoin,
  kCreateRoom,
  kStart,
  kSetSentence,
  kGuess,
  kChat,
  kState,
  kReveal,
  kRoundEnd,
  kScore,
  kError,
};

inline constexpr std::string_view to_string(MessageType t) {
  switch (t) {
    case MessageType::kJoin: return "JOIN";
    case MessageType::kCreateRoom: return "CREATE_ROOM";
    case MessageType::kStart: return "START";
    case MessageType::kSetSentence: return "SET_SENTENCE";
    case MessageType::kGuess: return "GUESS";
    case MessageType::kChat: return "CHAT";
    case MessageType::kState: return "STATE";
    case MessageType::kReveal: return "REVEAL";
    case MessageType::kRoundEnd: return "ROUND_END";
    case MessageType::kScore: return "SCORE";
    case MessageType::kError: return "ERROR";
  }
  return "ERROR";
}

inline std::optional<MessageType> parse_type(std::string_view s) {
  for (auto t : {MessageType::kJoin, MessageType::kCreateRoom, MessageType::kStart, MessageType::kSetSentence,
                 MessageType::kGuess, MessageType::kChat, MessageType::kState, MessageType::kReveal,
                 MessageType::kRoundEnd, MessageType::kScore, MessageType::kError})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

struct WireMessage {
  MessageType type = MessageType::kError;
  std::uint64_t seq = 0;
  nlohmann::json payload = nlohmann::json::object();
};

inline std::string encode(const WireMessage& m) {
  return store::dump_line({{"type", to_string(m.type)}, {"seq", m.seq}, {"payload", m.payload}});
}

/// Throws BAD_MESSAGE for anything that is not a well-formed envelope.
inline WireMessage decode(std::string_view frame) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(frame);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kBadMessage, e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kBadMessage, "envelope must be an object");
  const auto type = j.find("type");
  const auto seq = j.find("seq");
  if (type == j.end() || !type->is_string()) throw Error(ErrorCode::kBadMessage, "missing type");
  if (seq == j.end() || !seq->is_number_unsigned()) throw Error(ErrorCode::kBadMessage, "missing or negative seq");
  auto parsed = parse_type(type->get<std::string>());
  if (!parsed) throw Error(ErrorCode::kBadMessage, "unknown type " + type->get<std::string>());
  WireMessage m{*parsed, seq->get<std::uint64_t>(), nlohmann::json::object()};
  if (auto p = j.find("payload"); p != j.end() && !p->is_null()) {
    if (!p->is_object()) throw Error(ErrorCode::kBadMessage, "payload must be an object");
    m.payload = *p;
  }
  return m;
}

/// Reads a required string field from a payload.
inline std::string require_string(const nlohmann::json& payload, const char* key) {
  auto it = payload.find(key);
  if (it == payload.end() || !it->is_string())
    throw Error(ErrorCode::kBadMessage, std::string("payload.") + key + " must be a string");
  return it->get<std::string>();
}

/// Outbound sequence numbers for one connection; the transport stamps each
/// frame in send order.
class OutboundSequencer {
 public:
  std::string stamp(MessageType type, nlohmann::json payload) {
    return encode(WireMessage{type, ++last_, std::move(payload)});
  }
  std::uint64_t last() const noexcept { return last_; }

 private:
  std::uint64_t last_ = 0;
};

}  // namespace captionrace::protocol
