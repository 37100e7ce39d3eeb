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

#include <thread>

#include <gtest/gtest.h>

#include "captionrace/net/server.hpp"
#include "support/paths.hpp"

namespace cr = captionrace;
namespace net = cr::net;
namespace http = net::http;
namespace websocket = net::websocket;
using net::tcp;
using nlohmann::json;

namespace {

class LiveServer : public ::testing::Test {
 protected:
  void SetUp() override {
    auto images = cr::load_corpus(cr::testing::data("corpus/sample.json"));
    images.push_back({cr::ImageId("remote"), "https://example.org/cat.jpg", {"cat"}});
    images.push_back({cr::ImageId("escape"), "../../../etc/passwd", {"cat"}});
    corpus_ = std::make_shared<std::vector<cr::CorpusImage>>(images);
    cr::server::LobbyOptions lopts;
    lopts.auto_start = false;
    lopts.seed = 5;
    lopts.max_rooms = 3;
    store_ = std::make_shared<cr::store::MemoryRoundStore>();
    lobby_ = std::make_unique<cr::server::Lobby>(lopts, nullptr, corpus_, store_, [](const std::string&) {});
    net::ServerOptions sopts;
    sopts.address = "127.0.0.1";
    sopts.port = 0;
    sopts.corpus_dir = cr::testing::data_dir() / "corpus";
    sopts.tick_interval = std::chrono::milliseconds(20);
    sopts.max_frame_bytes = 4096;
    server_ = std::make_unique<net::Server>(io_, *lobby_, corpus_, sopts);
    server_->start();
    thread_ = std::thread([this] { io_.run(); });
  }

  void TearDown() override {
    net::asio::post(io_, [this] { server_->stop(); });
    io_.stop();
    thread_.join();
  }

  http::response<http::string_body> request(http::verb verb, const std::string& target, const std::string& body = "") {
    net::asio::io_context io;
    net::beast::tcp_stream stream(io);
    stream.connect(tcp::endpoint(net::asio::ip::make_address("127.0.0.1"), server_->port()));
    http::request<http::string_body> req{verb, target, 11};
    req.set(http::field::host, "localhost");
    req.body() = body;
    req.prepare_payload();
    http::write(stream, req);
    net::beast::flat_buffer buf;
    http::response<http::string_body> res;
    http::read(stream, buf, res);
    return res;
  }

  struct Ws {
    net::asio::io_context io;
    websocket::stream<tcp::socket> ws{io};
    std::uint64_t seq = 0;
    std::string id;
    std::string token;

    void connect(unsigned short port) {
      ws.next_layer().connect(tcp::endpoint(net::asio::ip::make_address("127.0.0.1"), port));
      ws.handshake("localhost", "/ws");
    }
    void send(const std::string& type, json payload) {
      ws.write(net::asio::buffer(cr::protocol::encode({*cr::protocol::parse_type(type), ++seq, std::move(payload)})));
    }
    json read() {
      net::beast::flat_buffer buf;
      ws.read(buf);
      return json::parse(net::beast::buffers_to_string(buf.data()));
    }
    /// Reads until a frame of `type` arrives, returning it.
    json until(const std::string& type) {
      for (;;) {
        auto f = read();
        if (f["type"] == type) return f;
      }
    }
  };

  std::string create_room() {
    const auto res = request(http::verb::post, "/rooms", R"({"config":{"roundDurationSec":30}})");
    EXPECT_EQ(res.result(), http::status::created);
    return json::parse(res.body())["roomId"];
  }

  net::asio::io_context io_;
  std::shared_ptr<std::vector<cr::CorpusImage>> corpus_;
  std::shared_ptr<cr::store::MemoryRoundStore> store_;
  std::unique_ptr<cr::server::Lobby> lobby_;
  std::unique_ptr<net::Server> server_;
  std::thread thread_;
};

}  // namespace

TEST_F(LiveServer, Healthz) {
  const auto res = request(http::verb::get, "/healthz");
  EXPECT_EQ(res.result(), http::status::ok);
  EXPECT_EQ(res[http::field::content_type], "application/json");
  EXPECT_EQ(json::parse(res.body()), (json{{"status", "ok"}, {"rooms", 0}}));
}

TEST_F(LiveServer, CreateRoomValidationAndCapacity) {
  const auto bad = request(http::verb::post, "/rooms", R"({"minPlayers":1})");
  EXPECT_EQ(bad.result(), http::status::bad_request);
  EXPECT_EQ(json::parse(bad.body())["error"], "INVALID_CONFIG");
  EXPECT_EQ(request(http::verb::post, "/rooms", "{oops").result(), http::status::bad_request);
  for (int i = 0; i < 3; ++i) create_room();
  const auto full = request(http::verb::post, "/rooms");
  EXPECT_EQ(full.result(), http::status::service_unavailable);
  EXPECT_EQ(json::parse(full.body())["error"], "CAPACITY");
  EXPECT_EQ(json::parse(request(http::verb::get, "/healthz").body())["rooms"], 3);
}

TEST_F(LiveServer, Images) {
  const auto svg = request(http::verb::get, "/images/img-01");
  EXPECT_EQ(svg.result(), http::status::ok);
  EXPECT_EQ(svg[http::field::content_type], "image/svg+xml");
  EXPECT_NE(svg.body().find("<svg"), std::string::npos);
  const auto remote = request(http::verb::get, "/images/remote");
  EXPECT_EQ(remote.result(), http::status::found);
  EXPECT_EQ(remote[http::field::location], "https://example.org/cat.jpg");
  EXPECT_EQ(request(http::verb::get, "/images/escape").result(), http::status::not_found);
  EXPECT_EQ(request(http::verb::get, "/images/nope").result(), http::status::not_found);
  EXPECT_EQ(request(http::verb::get, "/nothing").result(), http::status::not_found);
}

TEST_F(LiveServer, FullRoundOverWebSocketThenExport) {
  const auto room = create_room();
  std::vector<std::unique_ptr<Ws>> clients;
  for (const char* name : {"ann", "bob", "cyd"}) {
    auto c = std::make_unique<Ws>();
    c->connect(server_->port());
    c->send("JOIN", {{"roomId", room}, {"displayName", name}, {"protocolVersion", 1}});
    const auto st = c->until("STATE");
    c->id = st["payload"]["session"]["playerId"];
    c->token = st["payload"]["session"]["token"];
    EXPECT_EQ(st["payload"]["config"]["roundDurationSec"], 30);
    clients.push_back(std::move(c));
  }
  clients[0]->send("START", json::object());
  std::string leader;
  for (auto& c : clients) {
    json st;
    do st = c->until("STATE");
    while (st["payload"]["phase"] != "awaiting_sentence");
    leader = st["payload"]["leaderId"];
    EXPECT_EQ(st["payload"]["imageLocator"].get<std::string>().rfind("/images/", 0), 0u);
  }
  Ws* lead = nullptr;
  std::vector<Ws*> guessers;
  for (auto& c : clients) (c->id == leader ? lead : guessers.emplace_back(c.get())) = c.get();
  ASSERT_NE(lead, nullptr);
  ASSERT_EQ(guessers.size(), 2u);

  lead->send("SET_SENTENCE", {{"sentence", "A brown dog chases a ball"}});
  json gstate;
  do gstate = guessers[0]->until("STATE");
  while (gstate["payload"]["phase"] != "guessing");
  for (const auto& m : gstate["payload"]["mask"])
    if (m["status"] == "hidden") {
      EXPECT_FALSE(m.contains("text"));
    }

  guessers[0]->send("GUESS", {{"guess", "dog"}});
  const auto reveal = guessers[1]->until("REVEAL");
  EXPECT_EQ(reveal["payload"]["word"], "dog");
  EXPECT_EQ(reveal["payload"]["positions"], json::array({2}));

  lead->send("CHAT", {{"text", "ball!"}});
  EXPECT_EQ(lead->until("ERROR")["payload"]["code"], "LEADER_MUTED");

  guessers[1]->send("GUESS", {{"guess", "brown"}});
  guessers[0]->send("GUESS", {{"guess", "chases"}});
  guessers[1]->send("GUESS", {{"guess", "BALL"}});
  for (auto& c : clients) {
    const auto end = c->until("ROUND_END");
    EXPECT_EQ(end["payload"]["srVerified"], true);
    EXPECT_EQ(end["payload"]["persisted"], true);
  }

  const auto all = request(http::verb::get, "/export");
  EXPECT_EQ(all[http::field::content_type], "application/x-ndjson");
  const auto row = json::parse(all.body());
  EXPECT_EQ(row["sentence"], "A brown dog chases a ball");
  EXPECT_EQ(row["blanksRemaining"], 0);
  EXPECT_EQ(request(http::verb::get, "/export?verifiedOnly=true").body(), all.body());
}

TEST_F(LiveServer, BadFramesAndSequenceNumbers) {
  const auto room = create_room();
  Ws c;
  c.connect(server_->port());
  c.ws.write(net::asio::buffer(std::string("{not json")));
  const auto err = c.read();
  EXPECT_EQ(err["type"], "ERROR");
  EXPECT_EQ(err["payload"]["code"], "BAD_MESSAGE");
  EXPECT_EQ(err["seq"], 1);
  c.send("JOIN", {{"roomId", room}, {"displayName", "ann"}});
  const auto st = c.read();
  EXPECT_EQ(st["type"], "STATE");
  EXPECT_EQ(st["seq"], 2);
}

TEST_F(LiveServer, ReconnectWithTokenAfterDrop) {
  const auto room = create_room();
  std::string token, id;
  {
    Ws c;
    c.connect(server_->port());
    c.send("JOIN", {{"roomId", room}, {"displayName", "ann"}});
    const auto st = c.until("STATE");
    token = st["payload"]["session"]["token"];
    id = st["payload"]["session"]["playerId"];
  }  // socket closed without a close frame
  Ws again;
  again.connect(server_->port());
  again.send("JOIN", {{"roomId", room}, {"token", token}});
  const auto st = again.until("STATE");
  EXPECT_EQ(st["payload"]["session"]["playerId"], id);
  EXPECT_EQ(st["payload"]["scores"].size(), 1u);
}

TEST_F(LiveServer, OversizedFrameClosesConnection) {
  Ws c;
  c.connect(server_->port());
  c.send("CHAT", {{"text", std::string(10000, 'x')}});
  net::beast::flat_buffer buf;
  net::beast::error_code ec;
  c.ws.read(buf, ec);
  EXPECT_TRUE(ec);
}

TEST(Helpers, ContentTypesAndLocators) {
  EXPECT_EQ(net::content_type_for("a/b.png"), "image/png");
  EXPECT_EQ(net::content_type_for("a/b.bin"), "application/octet-stream");
  EXPECT_TRUE(net::is_remote_locator("https://x/y.jpg"));
  EXPECT_FALSE(net::is_remote_locator("images/y.jpg"));
}
