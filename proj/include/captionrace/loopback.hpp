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

#include <deque>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "captionrace/protocol.hpp"
#include "captionrace/room.hpp"

// In-process transport: the same frames a WebSocket would carry, delivered
// into per-connection inboxes. Used by the simulation harness and tests.
namespace captionrace::server {

class LoopbackHub {
 public:
  /// Sees every server-to-client frame as it is delivered.
  using Tap = std::function<void(ConnectionId, const std::string& frame)>;

  explicit LoopbackHub(Lobby& lobby) : lobby_(lobby) {}

  void set_tap(Tap tap) { tap_ = std::move(tap); }
  Lobby& lobby() noexcept { return lobby_; }

  ConnectionId open() {
    const auto id = lobby_.connect();
    links_[id];
    return id;
  }

  /// Sends a client frame with the connection's next inbound seq.
  void send(ConnectionId conn, protocol::MessageType type, nlohmann::json payload, TimePoint now) {
    auto& link = links_.at(conn);
    send_raw(conn, protocol::encode({type, ++link.client_seq, std::move(payload)}), now);
  }

  void send_raw(ConnectionId conn, const std::string& frame, TimePoint now) {
    deliver(lobby_.receive(conn, frame, now));
  }

  void close(ConnectionId conn, TimePoint now) {
    links_.erase(conn);
    deliver(lobby_.disconnect(conn, now));
  }

  void tick(TimePoint now) { deliver(lobby_.tick(now)); }

  /// Removes and returns everything queued for `conn`.
  std::vector<std::string> drain(ConnectionId conn) {
    auto& q = links_.at(conn).inbox;
    std::vector<std::string> out(std::make_move_iterator(q.begin()), std::make_move_iterator(q.end()));
    q.clear();
    return out;
  }

  bool has_pending(ConnectionId conn) const { return !links_.at(conn).inbox.empty(); }

 private:
  struct Link {
    std::uint64_t client_seq = 0;
    protocol::OutboundSequencer out;
    std::deque<std::string> inbox;
  };

  void deliver(std::vector<Delivery> deliveries) {
    for (auto& d : deliveries) {
      auto it = links_.find(d.to);
      if (it == links_.end()) continue;
      auto frame = it->second.out.stamp(d.type, std::move(d.payload));
      if (tap_) tap_(d.to, frame);
      it->second.inbox.push_back(std::move(frame));
    }
  }

  Lobby& lobby_;
  Tap tap_;
  std::map<ConnectionId, Link> links_;
};

}  // namespace captionrace::server
