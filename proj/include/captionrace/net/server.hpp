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

#include <chrono>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>

#include "captionrace/corpus.hpp"
#include "captionrace/error.hpp"
#include "captionrace/protocol.hpp"
#include "captionrace/room.hpp"
#include "captionrace/store.hpp"

// WebSocket (/ws) and HTTP endpoints on one port. Run the io_context from a
// single thread; room state is guarded by the lobby's own locks.
namespace captionrace::net {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

struct ServerOptions {
  std::string address = "0.0.0.0";
  unsigned short port = 8080;  // 0 picks a free port
  std::filesystem::path corpus_dir = ".";
  Duration tick_interval = std::chrono::milliseconds(250);
  std::size_t max_frame_bytes = 64 * 1024;
};

inline std::string content_type_for(const std::filesystem::path& p) {
  static const std::map<std::string, std::string> types{
      {".svg", "image/svg+xml"}, {".png", "image/png"},   {".jpg", "image/jpeg"},
      {".jpeg", "image/jpeg"},   {".gif", "image/gif"},   {".webp", "image/webp"}};
  auto it = types.find(p.extension().string());
  return it == types.end() ? "application/octet-stream" : it->second;
}

inline bool is_remote_locator(std::string_view locator) {
  return locator.rfind("http://", 0) == 0 || locator.rfind("https://", 0) == 0;
}

class Server;

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket socket, Server& server) : ws_(std::move(socket)), server_(server) {}

  void accept(http::request<http::string_body> req);
  void push(std::string frame) {
    queue_.push_back(std::move(frame));
    if (queue_.size() == 1) write_next();
  }
  protocol::OutboundSequencer& sequencer() { return out_; }
  void close() {
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

 private:
  void read_next();
  void write_next() {
    ws_.text(true);
    ws_.async_write(asio::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return;
      self->queue_.pop_front();
      if (!self->queue_.empty()) self->write_next();
    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  Server& server_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  protocol::OutboundSequencer out_;
  server::ConnectionId conn_ = 0;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket socket, Server& server) : stream_(std::move(socket)), server_(server) {}
  void run() { read_next(); }

 private:
  void read_next() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return;
      self->dispatch();
    });
  }
  void dispatch();

  beast::tcp_stream stream_;
  Server& server_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

class Server {
 public:
  Server(asio::io_context& io, server::Lobby& lobby, std::shared_ptr<const std::vector<CorpusImage>> corpus,
         ServerOptions options)
      : lobby_(lobby), corpus_(std::move(corpus)), options_(std::move(options)), acceptor_(io), timer_(io) {
    tcp::endpoint ep(asio::ip::make_address(options_.address), options_.port);
    acceptor_.open(ep.protocol());
    acceptor_.set_option(asio::socket_base::reuse_address(true));
    acceptor_.bind(ep);
    acceptor_.listen();
  }

  unsigned short port() const { return acceptor_.local_endpoint().port(); }
  const ServerOptions& options() const noexcept { return options_; }
  server::Lobby& lobby() noexcept { return lobby_; }

  void start() {
    accept_next();
    schedule_tick();
  }

  void stop() {
    beast::error_code ec;
    acceptor_.close(ec);
    timer_.cancel();
    for (auto& [id, weak] : sessions_)
      if (auto s = weak.lock()) s->close();
  }

  void attach(server::ConnectionId id, const std::shared_ptr<WsSession>& s) { sessions_[id] = s; }
  void detach(server::ConnectionId id) {
    sessions_.erase(id);
    deliver(lobby_.disconnect(id, wall_now()));
  }

  void deliver(std::vector<server::Delivery> deliveries) {
    for (auto& d : deliveries) {
      auto it = sessions_.find(d.to);
      if (it == sessions_.end()) continue;
      if (auto s = it->second.lock()) s->push(s->sequencer().stamp(d.type, std::move(d.payload)));
    }
  }

  http::response<http::string_body> handle_http(const http::request<http::string_body>& req) {
    const std::string target(req.target());
    const auto qpos = target.find('?');
    const std::string path = target.substr(0, qpos);
    const std::string query = qpos == std::string::npos ? "" : target.substr(qpos + 1);
    try {
      if (path == "/healthz" && req.method() == http::verb::get)
        return json_response(req, http::status::ok, {{"status", "ok"}, {"rooms", lobby_.room_count()}});
      if (path == "/rooms" && req.method() == http::verb::post) {
        json overrides = json::object();
        if (!req.body().empty()) {
          try {
            overrides = json::parse(req.body());
          } catch (const json::parse_error& e) {
            throw Error(ErrorCode::kBadMessage, e.what());
          }
          if (overrides.contains("config")) overrides = overrides["config"];
        }
        const auto room = lobby_.create_room(overrides, wall_now());
        return json_response(req, http::status::created, {{"roomId", room}});
      }
      if (path == "/export" && req.method() == http::verb::get) {
        std::ostringstream out;
        store::export_dataset(lobby_.store(), query_flag(query, "verifiedOnly"), out);
        return text_response(req, http::status::ok, out.str(), "application/x-ndjson");
      }
      if (path.rfind("/images/", 0) == 0 && req.method() == http::verb::get) return image_response(req, path.substr(8));
      return json_response(req, http::status::not_found, {{"error", "NOT_FOUND"}, {"detail", path}});
    } catch (const Error& e) {
      const auto status = e.code() == ErrorCode::kCapacity ? http::status::service_unavailable
                          : e.code() == ErrorCode::kStorageFailure ? http::status::internal_server_error
                                                                   : http::status::bad_request;
      return json_response(req, status, {{"error", to_string(e.code())}, {"detail", e.what()}});
    }
  }

 private:
  friend class WsSession;

  void accept_next() {
    acceptor_.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<HttpSession>(std::move(socket), *this)->run();
      accept_next();
    });
  }

  void schedule_tick() {
    timer_.expires_after(options_.tick_interval);
    timer_.async_wait([this](beast::error_code ec) {
      if (ec) return;
      deliver(lobby_.tick(wall_now()));
      schedule_tick();
    });
  }

  static bool query_flag(const std::string& query, const std::string& key) {
    std::istringstream in(query);
    std::string pair;
    while (std::getline(in, pair, '&')) {
      const auto eq = pair.find('=');
      if (pair.substr(0, eq) != key) continue;
      const auto v = eq == std::string::npos ? std::string("true") : pair.substr(eq + 1);
      return v == "true" || v == "1";
    }
    return false;
  }

  http::response<http::string_body> image_response(const http::request<http::string_body>& req,
                                                    const std::string& id) {
    const CorpusImage* image = nullptr;
    for (const auto& img : *corpus_)
      if (img.id.str() == id) image = &img;
    if (!image) return json_response(req, http::status::not_found, {{"error", "NOT_FOUND"}, {"detail", id}});
    if (is_remote_locator(image->locator)) {
      http::response<http::string_body> res{http::status::found, req.version()};
      res.set(http::field::location, image->locator);
      res.keep_alive(req.keep_alive());
      res.prepare_payload();
      return res;
    }
    namespace fs = std::filesystem;
    std::error_code ec;
    const auto root = fs::weakly_canonical(options_.corpus_dir, ec);
    const auto file = fs::weakly_canonical(options_.corpus_dir / image->locator, ec);
    const auto rel = file.lexically_relative(root);
    std::ifstream in(file, std::ios::binary);
    if (rel.empty() || *rel.begin() == ".." || !in)
      return json_response(req, http::status::not_found, {{"error", "NOT_FOUND"}, {"detail", image->locator}});
    std::ostringstream body;
    body << in.rdbuf();
    return text_response(req, http::status::ok, body.str(), content_type_for(file));
  }

  static http::response<http::string_body> text_response(const http::request<http::string_body>& req,
                                                          http::status status, std::string body,
                                                          const std::string& type) {
    http::response<http::string_body> res{status, req.version()};
    res.set(http::field::content_type, type);
    res.keep_alive(req.keep_alive());
    res.body() = std::move(body);
    res.prepare_payload();
    return res;
  }

  static http::response<http::string_body> json_response(const http::request<http::string_body>& req,
                                                          http::status status, const json& body) {
    return text_response(req, status, store::dump_line(body) + "\n", "application/json");
  }

  server::Lobby& lobby_;
  std::shared_ptr<const std::vector<CorpusImage>> corpus_;
  ServerOptions options_;
  tcp::acceptor acceptor_;
  asio::steady_timer timer_;
  std::map<server::ConnectionId, std::weak_ptr<WsSession>> sessions_;
};

inline void WsSession::accept(http::request<http::string_body> req) {
  ws_.read_message_max(server_.options().max_frame_bytes);
  ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
  ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
    if (ec) return;
    self->conn_ = self->server_.lobby().connect();
    self->server_.attach(self->conn_, self);
    self->read_next();
  });
}

inline void WsSession::read_next() {
  ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
    if (ec) {
      self->server_.detach(self->conn_);
      return;
    }
    const std::string frame = beast::buffers_to_string(self->buffer_.data());
    self->buffer_.consume(self->buffer_.size());
    self->server_.deliver(self->server_.lobby().receive(self->conn_, frame, wall_now()));
    self->read_next();
  });
}

inline void HttpSession::dispatch() {
  if (websocket::is_upgrade(req_)) {
    if (req_.target() == "/ws") {
      stream_.expires_never();
      std::make_shared<WsSession>(stream_.release_socket(), server_)->accept(std::move(req_));
      return;
    }
    http::response<http::string_body> res{http::status::not_found, req_.version()};
    res.prepare_payload();
    auto sp = std::make_shared<http::response<http::string_body>>(std::move(res));
    http::async_write(stream_, *sp, [self = shared_from_this(), sp](beast::error_code, std::size_t) {});
    return;
  }
  auto res = std::make_shared<http::response<http::string_body>>(server_.handle_http(req_));
  http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
    if (ec || !res->keep_alive()) {
      beast::error_code ignored;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
      return;
    }
    self->read_next();
  });
}

}  // namespace captionrace::net
