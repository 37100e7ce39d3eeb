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

// Game server: WebSocket play on /ws plus the HTTP endpoints, one port.

#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "captionrace/net/server.hpp"

namespace cr = captionrace;

int main(int argc, char** argv) {
  CLI::App app{"captionrace game server"};
  std::string address = "0.0.0.0";
  unsigned short port = 8080;
  std::string corpus_path;
  std::string store_path = "rounds.jsonl";
  std::string stopwords_path;
  cr::server::LobbyOptions lopts;
  int intermission_sec = 5;
  app.add_option("--address", address, "Listen address");
  app.add_option("--port", port, "Listen port (0 picks a free one)");
  app.add_option("--corpus", corpus_path, "Corpus JSON: [{imageId, locator, tags?}]")->required()->check(CLI::ExistingFile);
  app.add_option("--store", store_path, "Append-only round log (JSON Lines)");
  app.add_option("--round-seconds", lopts.defaults.round_duration_sec, "Guessing time per round");
  app.add_option("--sentence-seconds", lopts.defaults.sentence_timeout_sec, "Time the leader has to write");
  app.add_option("--points-per-word", lopts.defaults.points_per_word, "Points per newly revealed word");
  app.add_option("--min-players", lopts.defaults.min_players, "Players needed to start a round (>= 3)");
  app.add_option("--stopwords", stopwords_path, "Stop-word file, one word per line")->check(CLI::ExistingFile);
  app.add_option("--intermission", intermission_sec, "Seconds between rounds");
  app.add_option("--max-rooms", lopts.max_rooms, "Live room limit");
  CLI11_PARSE(app, argc, argv);

  try {
    lopts.defaults.validate();
    lopts.intermission = std::chrono::seconds(intermission_sec);
    auto corpus = std::make_shared<const std::vector<cr::CorpusImage>>(cr::load_corpus(corpus_path));
    std::shared_ptr<const cr::lexic::StopWordList> stops;
    if (!stopwords_path.empty()) stops = std::make_shared<cr::lexic::StopWordList>(cr::lexic::StopWordList::load(stopwords_path));
    auto store = std::make_shared<cr::store::JsonlRoundStore>(store_path);
    cr::server::Lobby lobby(lopts, stops, corpus, store);

    cr::net::asio::io_context io;
    cr::net::ServerOptions sopts;
    sopts.address = address;
    sopts.port = port;
    sopts.corpus_dir = std::filesystem::path(corpus_path).parent_path();
    cr::net::Server server(io, lobby, corpus, sopts);
    server.start();

    cr::net::asio::signal_set signals(io, SIGINT, SIGTERM);
    signals.async_wait([&](const boost::system::error_code&, int) {
      server.stop();
      io.stop();
    });
    std::cout << "listening on " << address << ":" << server.port() << " (" << corpus->size() << " images, store "
              << store_path << ")" << std::endl;
    io.run();
  } catch (const std::exception& e) {
    std::cerr << "captionrace_server: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
