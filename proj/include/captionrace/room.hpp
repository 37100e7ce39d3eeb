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
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "captionrace/corpus.hpp"
#include "captionrace/engine.hpp"
#include "captionrace/error.hpp"
#include "captionrace/lexic.hpp"
#include "captionrace/protocol.hpp"
#include "captionrace/rng.hpp"
#include "captionrace/store.hpp"

// Transport-agnostic server core. A Lobby owns rooms and connection
// bindings; it turns inbound frames into addressed deliveries. Transports
// (the WebSocket server, the in-process loopback) only move bytes and stamp
// outbound sequence numbers.
namespace captionrace::server {

using ConnectionId = std::uint64_t;
using protocol::MessageType;
using nlohmann::json;

struct Delivery {
  ConnectionId to = 0;
  MessageType type = MessageType::kError;
  json payload;
};

struct LobbyOptions {
  engine::GameConfig defaults;
  std::size_t max_rooms = 256;
  Duration intermission = std::chrono::seconds(5);
  bool auto_start = true;
  std::uint64_t seed = 0;  // 0 draws from std::random_device
  std::string image_url_prefix = "/images/";  // empty: send corpus locators verbatim
  Duration empty_room_ttl = std::chrono::minutes(10);
  std::size_t max_display_name = 32;
};

/// Thread-safe wrapper; one store, many rooms.
class SharedPersister {
 public:
  SharedPersister(std::shared_ptr<store::RoundStore> store, store::RoundPersister::AlertSink alert)
      : persister_(std::move(store), std::move(alert)) {}

  bool persist(RoundRecord record) {
    std::lock_guard lock(mu_);
    return persister_.persist(std::move(record));
  }
  bool flush() {
    std::lock_guard lock(mu_);
    return persister_.flush();
  }
  std::size_t pending() const {
    std::lock_guard lock(mu_);
    return persister_.pending();
  }
  store::RoundStore& store() const { return persister_.store(); }

 private:
  mutable std::mutex mu_;
  store::RoundPersister persister_;
};

struct RoomContext {
  std::shared_ptr<const lexic::StopWordList> stops;
  std::shared_ptr<const std::vector<CorpusImage>> corpus;
  SharedPersister* persister = nullptr;
  const LobbyOptions* options = nullptr;
};

/// One game room. Every public method expects `mutex()` to be held; the
/// lobby takes it, which gives the room a single total order of commands.
class Room {
 public:
  struct Seat {
    PlayerId id;
    std::string token;
    ConnectionId conn = 0;  // 0 while disconnected
  };

  Room(RoomId id, engine::GameConfig config, RoomContext ctx, std::uint64_t seed, TimePoint now)
      : id_(std::move(id)),
        game_(config, ctx.stops, id_.str() + "-"),
        ctx_(ctx),
        rng_(seed),
        created_at_(now),
        empty_since_(now) {}

  std::mutex& mutex() { return mu_; }
  const RoomId& id() const noexcept { return id_; }
  const engine::Game& game() const noexcept { return game_; }
  const std::vector<Seat>& seats() const noexcept { return seats_; }
  TimePoint created_at() const noexcept { return created_at_; }
  std::optional<TimePoint> empty_since() const noexcept { return empty_since_; }

  struct JoinResult {
    PlayerId player;
    std::vector<Delivery> out;
  };

  /// New seat, or a reconnect when `token` names an existing one.
  JoinResult join(ConnectionId conn, const std::string& display_name, const std::optional<std::string>& token,
                  TimePoint now) {
    Seat* seat = nullptr;
    if (token) {
      auto it = std::find_if(seats_.begin(), seats_.end(), [&](const Seat& s) { return s.token == *token; });
      if (it == seats_.end()) throw Error(ErrorCode::kUnauthenticated, "unknown session token");
      seat = &*it;
      seat->conn = conn;
      std::vector<Delivery> out;
      game_.set_connected(seat->id, true);
      empty_since_.reset();
      broadcast_state(out);
      return {seat->id, std::move(out)};
    }
    PlayerId pid{"p" + std::to_string(++player_counter_)};
    game_.add_player(pid, display_name);
    seats_.push_back(Seat{pid, new_token(), conn});
    empty_since_.reset();
    std::vector<Delivery> out;
    broadcast_state(out);
    (void)now;
    return {pid, std::move(out)};
  }

  std::vector<Delivery> handle(ConnectionId conn, const PlayerId& player, const protocol::WireMessage& msg,
                               TimePoint now) {
    std::vector<Delivery> out;
    const Seat* seat = find_seat(player);
    if (!seat || seat->conn != conn) {
      error(out, conn, Error(ErrorCode::kUnauthenticated, "session no longer bound to a seat"));
      return out;
    }
    try {
      switch (msg.type) {
        case MessageType::kStart: on_start(out, now); break;
        case MessageType::kSetSentence: on_set_sentence(out, player, msg.payload, now); break;
        case MessageType::kGuess: on_guess(out, player, msg.payload, now); break;
        case MessageType::kChat: on_chat(out, conn, player, msg.payload); break;
        case MessageType::kJoin:
        case MessageType::kCreateRoom: throw Error(ErrorCode::kBadMessage, "already joined a room");
        default: throw Error(ErrorCode::kBadMessage, std::string(protocol::to_string(msg.type)) + " is server-only");
      }
    } catch (const Error& e) {
      error(out, conn, e);
    }
    return out;
  }

  std::vector<Delivery> disconnect(ConnectionId conn, const PlayerId& player, TimePoint now) {
    std::vector<Delivery> out;
    Seat* seat = find_seat(player);
    if (!seat || seat->conn != conn) return out;
    seat->conn = 0;
    std::optional<engine::RoundState> snapshot;
    if (game_.round_active()) snapshot = *game_.round();
    if (auto reason = game_.set_connected(player, false); reason && snapshot) announce_abort(out, *snapshot, *reason, now);
    if (std::none_of(seats_.begin(), seats_.end(), [](const Seat& s) { return s.conn != 0; })) empty_since_ = now;
    broadcast_state(out);
    return out;
  }

  std::vector<Delivery> tick(TimePoint now) {
    std::vector<Delivery> out;
    ctx_.persister->flush();
    run_clock(out, now);
    if (!game_.round_active() && next_auto_start_ && now >= *next_auto_start_ &&
        game_.connected_count() >= game_.config().min_players) {
      try {
        on_start(out, now);
      } catch (const Error&) {
        next_auto_start_.reset();
      }
    }
    return out;
  }

  /// The scoreboard and mask exactly as `player` is allowed to see them.
  json state_for(const PlayerId& player) const {
    const engine::RoundState* r = game_.round();
    json s = {{"roomId", id_}, {"you", player}, {"config", game_.config()}, {"scores", scoreboard()}};
    s["phase"] = r ? std::string(engine::to_string(r->phase)) : std::string("idle");
    s["role"] = (r && r->active()) ? (r->leader == player ? "leader" : "guesser") : "player";
    s["nextRoundMs"] = next_auto_start_ ? json(to_epoch_ms(*next_auto_start_)) : json(nullptr);
    if (!r) return s;
    s["roundId"] = r->round_id;
    s["leaderId"] = r->leader;
    s["imageId"] = r->image_id;
    s["imageLocator"] = locator_for(r->image_id, r->image_locator);
    s["sentenceDeadlineMs"] = to_epoch_ms(r->sentence_deadline);
    s["deadlineMs"] = r->deadline ? json(to_epoch_ms(*r->deadline)) : json(nullptr);
    const bool full = r->leader == player || r->phase == engine::Phase::kEnded;
    s["mask"] = r->sentence ? mask_json(*r->sentence, full) : json::array();
    return s;
  }

 private:
  Seat* find_seat(const PlayerId& id) {
    auto it = std::find_if(seats_.begin(), seats_.end(), [&](const Seat& s) { return s.id == id; });
    return it == seats_.end() ? nullptr : &*it;
  }
  const Seat* find_seat(const PlayerId& id) const { return const_cast<Room*>(this)->find_seat(id); }

  std::string new_token() {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string t;
    for (int i = 0; i < 32; ++i) t += kHex[rng_.index(16)];
    return t;
  }

  std::string locator_for(const ImageId& id, const std::string& locator) const {
    return ctx_.options->image_url_prefix.empty() ? locator : ctx_.options->image_url_prefix + id.str();
  }

  static json mask_json(const engine::MaskedSentence& mask, bool full) {
    json arr = json::array();
    for (std::size_t i = 0; i < mask.tokens().size(); ++i) {
      const auto& t = mask.tokens()[i];
      const auto st = mask.status(i);
      json e = {{"len", lexic::utf8_length(t.norm)}, {"status", engine::to_string(st)}};
      if (full || st != engine::MaskStatus::kHidden) e["text"] = t.norm;
      arr.push_back(std::move(e));
    }
    return arr;
  }

  json scoreboard() const {
    json arr = json::array();
    for (const auto& p : game_.players())
      arr.push_back({{"playerId", p.id}, {"displayName", p.display_name}, {"score", p.score}, {"connected", p.connected}});
    return arr;
  }

  void send(std::vector<Delivery>& out, ConnectionId to, MessageType type, json payload) const {
    if (to != 0) out.push_back(Delivery{to, type, std::move(payload)});
  }

  void broadcast(std::vector<Delivery>& out, MessageType type, const json& payload) const {
    for (const auto& s : seats_) send(out, s.conn, type, payload);
  }

  void broadcast_state(std::vector<Delivery>& out) const {
    for (const auto& s : seats_) send(out, s.conn, MessageType::kState, state_for(s.id));
  }

  void error(std::vector<Delivery>& out, ConnectionId to, const Error& e) const {
    send(out, to, MessageType::kError, {{"code", to_string(e.code())}, {"message", e.what()}});
  }

  const CorpusImage& peek_image() {
    const auto& corpus = *ctx_.corpus;
    if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "no images loaded");
    if (deck_.empty()) {
      // Uniform without replacement within the session; reshuffle when spent.
      for (std::size_t i = 0; i < corpus.size(); ++i) deck_.push_back(i);
      rng_.shuffle(deck_);
    }
    return corpus[deck_.back()];
  }

  void on_start(std::vector<Delivery>& out, TimePoint now) {
    game_.start_round(peek_image(), now);
    deck_.pop_back();
    next_auto_start_.reset();
    broadcast_state(out);
  }

  void on_set_sentence(std::vector<Delivery>& out, const PlayerId& player, const json& payload, TimePoint now) {
    game_.set_sentence(player, protocol::require_string(payload, "sentence"), now);
    broadcast_state(out);
  }

  void on_guess(std::vector<Delivery>& out, const PlayerId& player, const json& payload, TimePoint now) {
    const auto guess = protocol::require_string(payload, "guess");
    const auto outcome = game_.submit_guess(player, guess, now);
    if (outcome.correct()) {
      broadcast(out, MessageType::kReveal,
                {{"positions", outcome.revealed_positions},
                 {"word", outcome.norm},
                 {"guesserId", player},
                 {"points", outcome.points_awarded}});
      broadcast(out, MessageType::kScore, {{"scores", scoreboard()}});
    } else {
      broadcast(out, MessageType::kGuess,
                {{"guesserId", player}, {"guess", guess}, {"result", json(outcome.result)}});
    }
    run_clock(out, now);
  }

  void on_chat(std::vector<Delivery>& out, ConnectionId conn, const PlayerId& player, const json& payload) {
    const auto text = protocol::require_string(payload, "text");
    const auto* r = game_.round();
    if (r && r->active() && r->leader == player) {
      error(out, conn, Error(ErrorCode::kLeaderMuted, "the leader cannot chat during their round"));
      return;
    }
    const auto* p = game_.find_player(player);
    broadcast(out, MessageType::kChat,
              {{"playerId", player}, {"displayName", p ? p->display_name : ""}, {"text", redact(text)}});
  }

  // Chat must not carry a hidden word to other guessers.
  std::string redact(const std::string& text) const {
    const auto* r = game_.round();
    if (!r || !r->active() || !r->sentence) return text;
    std::string out;
    for (auto span : lexic::split_whitespace(text)) {
      if (!out.empty()) out += ' ';
      auto norm = lexic::try_normalize(span);
      if (norm && r->sentence->is_hidden(*norm)) out += std::string(lexic::utf8_length(*norm), '_');
      else out += span;
    }
    return out;
  }

  void run_clock(std::vector<Delivery>& out, TimePoint now) {
    if (!game_.round_active()) return;
    std::optional<engine::RoundState> snapshot;
    if (game_.round()->phase == engine::Phase::kAwaitingSentence) snapshot = *game_.round();
    auto res = game_.tick(now);
    if (res.record) {
      const bool durable = ctx_.persister->persist(*res.record);
      json end = round_end_payload(*game_.round(), false, std::nullopt);
      end["persisted"] = durable;
      broadcast(out, MessageType::kRoundEnd, end);
      schedule_next(now);
      broadcast_state(out);
    } else if (res.aborted && snapshot) {
      announce_abort(out, *snapshot, *res.aborted, now);
      broadcast_state(out);
    }
  }

  void announce_abort(std::vector<Delivery>& out, const engine::RoundState& r, engine::AbortReason reason,
                      TimePoint now) {
    json end = round_end_payload(r, true, reason);
    end["persisted"] = false;
    broadcast(out, MessageType::kRoundEnd, end);
    schedule_next(now);
  }

  void schedule_next(TimePoint now) {
    if (ctx_.options->auto_start) next_auto_start_ = now + ctx_.options->intermission;
  }

  json round_end_payload(const engine::RoundState& r, bool aborted, std::optional<engine::AbortReason> reason) const {
    json p = {{"roundId", r.round_id}, {"aborted", aborted}, {"scores", scoreboard()}};
    if (reason) p["reason"] = engine::to_string(*reason);
    if (r.sentence) {
      p["sentence"] = r.raw_sentence;
      p["mask"] = mask_json(*r.sentence, true);
      p["blanksRemaining"] = r.sentence->blanks_remaining();
      p["contentNormCount"] = r.sentence->content_norm_count();
      p["srVerified"] = !aborted && r.sentence->blanks_remaining() == 0;
    }
    return p;
  }

  RoomId id_;
  engine::Game game_;
  RoomContext ctx_;
  Rng rng_;
  TimePoint created_at_;
  std::optional<TimePoint> empty_since_;
  std::vector<Seat> seats_;
  std::uint64_t player_counter_ = 0;
  std::vector<std::size_t> deck_;
  std::optional<TimePoint> next_auto_start_;
  std::mutex mu_;
};

class Lobby {
 public:
  Lobby(LobbyOptions options, std::shared_ptr<const lexic::StopWordList> stops,
        std::shared_ptr<const std::vector<CorpusImage>> corpus, std::shared_ptr<store::RoundStore> store,
        store::RoundPersister::AlertSink alert = nullptr)
      : options_(std::move(options)),
        stops_(std::move(stops)),
        corpus_(std::move(corpus)),
        persister_(std::move(store), std::move(alert)),
        rng_(options_.seed != 0 ? options_.seed : std::random_device{}()) {
    options_.defaults.validate();
    if (!stops_) stops_ = std::make_shared<lexic::StopWordList>(lexic::StopWordList::builtin());
    if (!corpus_) corpus_ = std::make_shared<std::vector<CorpusImage>>();
  }

  const LobbyOptions& options() const noexcept { return options_; }
  store::RoundStore& store() const { return persister_.store(); }
  std::size_t pending_persist() const { return persister_.pending(); }

  ConnectionId connect() {
    std::lock_guard lock(mu_);
    const ConnectionId id = ++conn_counter_;
    conns_.emplace(id, ConnState{});
    return id;
  }

  RoomId create_room(const json& overrides, TimePoint now) {
    std::lock_guard lock(mu_);
    return create_room_locked(overrides, now);
  }

  std::size_t room_count() const {
    std::lock_guard lock(mu_);
    return rooms_.size();
  }

  /// Runs `fn(const Room&)` under the room's lock; false if no such room.
  template <class F>
  bool inspect(const RoomId& id, F&& fn) {
    std::shared_ptr<Room> room;
    {
      std::lock_guard lock(mu_);
      auto it = rooms_.find(id);
      if (it == rooms_.end()) return false;
      room = it->second;
    }
    std::lock_guard lock(room->mutex());
    fn(static_cast<const Room&>(*room));
    return true;
  }

  std::vector<Delivery> receive(ConnectionId conn, std::string_view frame, TimePoint now) {
    protocol::WireMessage msg;
    try {
      msg = protocol::decode(frame);
    } catch (const Error& e) {
      return {error_delivery(conn, e)};
    }

    std::shared_ptr<Room> room;
    PlayerId player;
    {
      std::lock_guard lock(mu_);
      auto it = conns_.find(conn);
      if (it == conns_.end()) return {};
      ConnState& cs = it->second;
      if (cs.last_inbound && msg.seq <= *cs.last_inbound) return {};  // duplicate or stale
      cs.last_inbound = msg.seq;
      if (msg.type == MessageType::kJoin || msg.type == MessageType::kCreateRoom) {
        try {
          return join_locked(conn, cs, msg, now);
        } catch (const Error& e) {
          return {error_delivery(conn, e)};
        }
      }
      if (!cs.room) return {error_delivery(conn, Error(ErrorCode::kUnauthenticated, "send JOIN first"))};
      auto rit = rooms_.find(*cs.room);
      if (rit == rooms_.end()) return {error_delivery(conn, Error(ErrorCode::kUnknownRoom, cs.room->str()))};
      room = rit->second;
      player = cs.player;
    }
    std::lock_guard lock(room->mutex());
    return room->handle(conn, player, msg, now);
  }

  std::vector<Delivery> disconnect(ConnectionId conn, TimePoint now) {
    std::shared_ptr<Room> room;
    PlayerId player;
    {
      std::lock_guard lock(mu_);
      auto it = conns_.find(conn);
      if (it == conns_.end()) return {};
      if (it->second.room) {
        if (auto rit = rooms_.find(*it->second.room); rit != rooms_.end()) room = rit->second;
        player = it->second.player;
      }
      conns_.erase(it);
    }
    if (!room) return {};
    std::lock_guard lock(room->mutex());
    return room->disconnect(conn, player, now);
  }

  std::vector<Delivery> tick(TimePoint now) {
    std::vector<std::shared_ptr<Room>> rooms;
    {
      std::lock_guard lock(mu_);
      for (auto it = rooms_.begin(); it != rooms_.end();) {
        auto& room = it->second;
        std::lock_guard room_lock(room->mutex());
        if (room->empty_since() && now - *room->empty_since() >= options_.empty_room_ttl) {
          it = rooms_.erase(it);
          continue;
        }
        rooms.push_back(room);
        ++it;
      }
    }
    std::vector<Delivery> out;
    for (auto& room : rooms) {
      std::lock_guard lock(room->mutex());
      auto d = room->tick(now);
      out.insert(out.end(), std::make_move_iterator(d.begin()), std::make_move_iterator(d.end()));
    }
    return out;
  }

 private:
  struct ConnState {
    std::optional<RoomId> room;
    PlayerId player;
    std::optional<std::uint64_t> last_inbound;
  };

  static Delivery error_delivery(ConnectionId conn, const Error& e) {
    return Delivery{conn, MessageType::kError, {{"code", to_string(e.code())}, {"message", e.what()}}};
  }

  RoomId create_room_locked(const json& overrides, TimePoint now) {
    if (rooms_.size() >= options_.max_rooms)
      throw Error(ErrorCode::kCapacity, std::to_string(options_.max_rooms) + " rooms live");
    const auto config = options_.defaults.merged(overrides);
    RoomId id;
    do id = RoomId{room_code()};
    while (rooms_.count(id));
    RoomContext ctx{stops_, corpus_, &persister_, &options_};
    rooms_.emplace(id, std::make_shared<Room>(id, config, ctx, rng_.next(), now));
    return id;
  }

  std::string room_code() {
    static constexpr std::string_view kAlphabet = "ABCDEFGHJKLMNPQRSTUVWXYZ23456789";
    std::string code;
    for (int i = 0; i < 6; ++i) code += kAlphabet[rng_.index(kAlphabet.size())];
    return code;
  }

  std::vector<Delivery> join_locked(ConnectionId conn, ConnState& cs, const protocol::WireMessage& msg,
                                    TimePoint now) {
    if (cs.room) throw Error(ErrorCode::kBadMessage, "already joined a room");
    const auto& p = msg.payload;
    if (auto v = p.find("protocolVersion"); v != p.end() && *v != protocol::kProtocolVersion)
      throw Error(ErrorCode::kBadMessage, "unsupported protocol version");

    std::optional<std::string> token;
    if (auto t = p.find("token"); t != p.end() && !t->is_null()) {
      if (!t->is_string()) throw Error(ErrorCode::kBadMessage, "payload.token must be a string");
      token = t->get<std::string>();
    }
    std::string name;
    if (!token || p.contains("displayName")) {
      name = std::string(lexic::trim(protocol::require_string(p, "displayName")));
      if (name.empty() || name.size() > options_.max_display_name)
        throw Error(ErrorCode::kBadMessage, "displayName must be 1.." + std::to_string(options_.max_display_name) + " bytes");
    }

    RoomId room_id;
    if (msg.type == MessageType::kCreateRoom) {
      room_id = create_room_locked(p.value("config", json::object()), now);
    } else {
      room_id = RoomId{protocol::require_string(p, "roomId")};
    }
    auto rit = rooms_.find(room_id);
    if (rit == rooms_.end()) throw Error(ErrorCode::kUnknownRoom, room_id.str());
    auto& room = *rit->second;
    std::lock_guard lock(room.mutex());
    auto result = room.join(conn, name, token, now);
    cs.room = room_id;
    cs.player = result.player;
    // The joiner learns its seat and reconnect token in its first STATE.
    for (auto& d : result.out) {
      if (d.to == conn && d.type == MessageType::kState) {
        const auto& seats = room.seats();
        auto seat = std::find_if(seats.begin(), seats.end(), [&](const Room::Seat& s) { return s.id == result.player; });
        d.payload["session"] = {{"playerId", result.player}, {"token", seat->token}};
      }
    }
    return std::move(result.out);
  }

  LobbyOptions options_;
  std::shared_ptr<const lexic::StopWordList> stops_;
  std::shared_ptr<const std::vector<CorpusImage>> corpus_;
  SharedPersister persister_;
  Rng rng_;
  mutable std::mutex mu_;
  std::map<RoomId, std::shared_ptr<Room>> rooms_;
  std::map<ConnectionId, ConnState> conns_;
  ConnectionId conn_counter_ = 0;
};

}  // namespace captionrace::server
