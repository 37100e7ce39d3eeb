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

// Offline analysis: the blanks-vs-verification table, sentence quality
// comparison and dataset export from a round log.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "captionrace/quality.hpp"
#include "captionrace/store.hpp"
#include "captionrace/verify.hpp"

namespace cr = captionrace;

namespace {

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cr::Error(cr::ErrorCode::kIo, "cannot open " + path);
  return in;
}

// Plain text, one sentence per line, or JSON Lines with a "sentence" field
// (the export format).
std::vector<std::string> read_sentences(const std::string& path) {
  auto in = open_or_throw(path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = cr::lexic::trim(line);
    if (t.empty()) continue;
    if (t.front() == '{') {
      try {
        out.push_back(nlohmann::json::parse(t).at("sentence").get<std::string>());
        continue;
      } catch (const nlohmann::json::exception&) {
      }
    }
    out.emplace_back(t);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"captionrace analysis"};
  app.require_subcommand(1);
  std::string lexicon_dir = std::string(CAPTIONRACE_DATA_DIR) + "/lexicon";
  bool as_json = false;

  auto* blanks = app.add_subcommand("blanks", "Verified percentage per blanks bucket");
  std::string records_path, votes_path, comparison_path, label = "game";
  blanks->add_option("--records", records_path, "Round log (JSON Lines)")->required()->check(CLI::ExistingFile);
  blanks->add_option("--votes", votes_path, "Votes on game sentences (JSON Lines)")->required()->check(CLI::ExistingFile);
  blanks->add_option("--comparison", comparison_path, "Votes on other sources (JSON Lines)")->check(CLI::ExistingFile);
  blanks->add_option("--label", label, "Source label for game rows");
  blanks->add_flag("--json", as_json, "Emit JSON");

  auto* quality = app.add_subcommand("quality", "Compare object/relationship/attribute counts of two corpora");
  std::string a_path, b_path, a_label = "A", b_label = "B";
  quality->add_option("--a", a_path, "First corpus")->required()->check(CLI::ExistingFile);
  quality->add_option("--b", b_path, "Second corpus")->required()->check(CLI::ExistingFile);
  quality->add_option("--a-label", a_label);
  quality->add_option("--b-label", b_label);
  quality->add_option("--lexicon", lexicon_dir, "Lexicon directory")->check(CLI::ExistingDirectory);
  quality->add_flag("--json", as_json, "Emit JSON");

  auto* extract = app.add_subcommand("extract", "Show the counts and mentions found in one sentence");
  std::string sentence;
  extract->add_option("sentence", sentence)->required();
  extract->add_option("--lexicon", lexicon_dir, "Lexicon directory")->check(CLI::ExistingDirectory);

  auto* exporter = app.add_subcommand("export", "Public dataset lines from a round log");
  std::string store_path;
  bool verified_only = false;
  exporter->add_option("--store", store_path, "Round log (JSON Lines)")->required()->check(CLI::ExistingFile);
  exporter->add_flag("--verified-only", verified_only, "Only rounds with zero blanks");
  CLI11_PARSE(app, argc, argv);

  try {
    if (*blanks) {
      const auto records = cr::store::read_round_log(records_path);
      auto vin = open_or_throw(votes_path);
      const auto votes = cr::verify::parse_votes(vin, votes_path);
      std::vector<cr::verify::VoteRecord> comparison;
      if (!comparison_path.empty()) {
        auto cin = open_or_throw(comparison_path);
        comparison = cr::verify::parse_vote_list(cin, comparison_path);
      }
      const auto report = cr::verify::build_blanks_report(records, votes, comparison);
      const auto agreement = cr::verify::agreement_stats(records, votes);
      if (as_json) {
        std::cout << cr::verify::report_json(report, agreement).dump(2) << "\n";
      } else {
        std::cout << cr::verify::to_text(report, label);
        auto line = [](const char* what, const std::optional<double>& v, int n) {
          std::cout << what << (v ? cr::verify::format_pct(*v) : std::string("n/a")) << " (n=" << n << ")\n";
        };
        line("majority-verified given zero blanks: ", agreement.pct_majority_given_sr_verified, agreement.sr_verified_count);
        line("majority-verified given blanks left: ", agreement.pct_majority_given_not_sr_verified,
             agreement.not_sr_verified_count);
      }
    } else if (*quality) {
      const auto lex = cr::quality::Lexicons::load(lexicon_dir);
      const auto c = cr::quality::compare_sources(read_sentences(a_path), read_sentences(b_path), lex);
      if (as_json) std::cout << cr::quality::comparison_json(c, a_label, b_label).dump(2) << "\n";
      else std::cout << cr::quality::comparison_text(c, a_label, b_label);
    } else if (*extract) {
      const auto lex = cr::quality::Lexicons::load(lexicon_dir);
      const auto c = cr::quality::extract_counts(sentence, lex);
      std::cout << "objects=" << c.objects << " attributes=" << c.attributes << " relationships=" << c.relationships
                << "\n";
      for (const auto& m : c.mentions) std::cout << "  " << cr::quality::to_string(m.role) << "\t" << m.norm << "\n";
    } else {
      cr::store::MemoryRoundStore store;
      for (const auto& r : cr::store::read_round_log(store_path)) store.append(r);
      cr::store::export_dataset(store, verified_only, std::cout);
    }
  } catch (const cr::Error& e) {
    std::cerr << "analyze: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
