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

// Bot cohorts on the in-process transport: one experiment or a parameter sweep.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "captionrace/sim.hpp"

namespace cr = captionrace;

namespace {

void emit(const nlohmann::json& j, const std::string& out) {
  const auto text = j.dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw cr::Error(cr::ErrorCode::kIo, "cannot write " + out);
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"captionrace simulation harness"};
  app.require_subcommand(1);
  std::string corpus_path = std::string(CAPTIONRACE_DATA_DIR) + "/corpus/sample.json";
  std::string lexicon_dir = std::string(CAPTIONRACE_DATA_DIR) + "/lexicon";
  std::string out;

  auto* run = app.add_subcommand("run", "Run one cohort and report the blanks/accuracy trend");
  cr::sim::ExperimentConfig cfg;
  run->add_option("--corpus", corpus_path, "Tagged corpus JSON")->check(CLI::ExistingFile);
  run->add_option("--lexicon", lexicon_dir, "Directory with nouns/adjectives/relations.txt")->check(CLI::ExistingDirectory);
  run->add_option("--rounds", cfg.rounds, "Rounds to play");
  run->add_option("--fidelity", cfg.fidelity, "Leader fidelity in [0,1]");
  run->add_option("--fidelity-mix", cfg.fidelity_mix, "Draw fidelity per round from these values");
  run->add_option("--ability", cfg.ability, "Guesser ability in [0,1]");
  run->add_option("--guessers", cfg.guessers, "Guesser bots (>= 2)");
  run->add_option("--round-seconds", cfg.round_duration_sec, "Guessing time per round");
  run->add_option("--guess-interval-ms", cfg.guess_interval_ms, "Mean gap between a bot's guesses");
  run->add_option("--threshold", cfg.accuracy_threshold, "Tag overlap that labels a sentence accurate");
  run->add_option("--seed", cfg.seed, "RNG seed");
  run->add_option("--out", out, "Report path (default stdout)");

  auto* sweep = app.add_subcommand("sweep", "One cohort per grid cell");
  std::string grid_path;
  sweep->add_option("--grid", grid_path, "Grid JSON: {fidelity:[..], ability:[..], roundDurationSec:[..], rounds, seed}")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--corpus", corpus_path, "Tagged corpus JSON")->check(CLI::ExistingFile);
  sweep->add_option("--lexicon", lexicon_dir, "Lexicon directory")->check(CLI::ExistingDirectory);
  sweep->add_option("--out", out, "Table path (default stdout)");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto corpus = cr::load_corpus(corpus_path);
    const auto lex = cr::quality::Lexicons::load(lexicon_dir);
    if (*run) {
      emit(cr::sim::report_json(cr::sim::run_experiment(corpus, cfg, lex)), out);
    } else {
      std::ifstream in(grid_path);
      nlohmann::json grid;
      try {
        grid = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw cr::Error(cr::ErrorCode::kParseError, grid_path + ": " + e.what());
      }
      emit(cr::sim::sweep_json(cr::sim::sweep(corpus, cr::sim::SweepGrid::from_json(grid), lex)), out);
    }
  } catch (const cr::Error& e) {
    std::cerr << "simrace: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
