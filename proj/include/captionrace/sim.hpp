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
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "captionrace/corpus.hpp"
#include "captionrace/engine.hpp"
#include "captionrace/error.hpp"
#include "captionrace/lexic.hpp"
#include "captionrace/loopback.hpp"
#include "captionrace/quality.hpp"
#include "captionrace/rng.hpp"
#include "captionrace/room.hpp"
#include "captionrace/stats.hpp"
#include "captionrace/store.hpp"

// Bot cohorts that play full rounds through the lobby over the in-process
// transport on a virtual clock, and the analyses run over what they produce.
namespace captionrace::sim {

using nlohmann::json;

enum class Slot { kAttribute, kObject, kRelation };

/// Sentence skeleton: literal stop words plus typed slots written
/// "{attribute}", "{object}" or "{relation}".
struct Template {
  struct Part {
    std::optional<Slot> slot;
    std::string literal;
  };
  std::vector<Part> parts;

  static Template parse(std::string_view text) {
    Template t;
    for (auto span : lexic::split_whitespace(text)) {
      if (span == "{attribute}") t.parts.push_back({Slot::kAttribute, {}});
      else if (span == "{object}") t.parts.push_back({Slot::kObject, {}});
      else if (span == "{relation}") t.parts.push_back({Slot::kRelation, {}});
      else t.parts.push_back({std::nullopt, std::string(span)});
    }
    return t;
  }

  std::size_t slot_count() const {
    return static_cast<std::size_t>(std::count_if(parts.begin(), parts.end(), [](const Part& p) { return p.slot.has_value(); }));
  }
};

inline std::vector<std::string> default_templates() {
  return {
      "a {attribute} {object} {relation} a {object}",
      "the {object} {relation} the {attribute} {object}",
      "a {object} and a {object} {relation} the {object}",
      "a {attribute} {object} {relation} a {attribute} {object}",
      "the {attribute} {attribute} {object} {relation} a {object}",
      "a {object} {relation} a {object} near the {object}",
  };
}

struct LeaderBotModel {
  double fidelity = 1.0;
  std::vector<double> fidelity_mix;  // when set, one value is drawn per round
  std::vector<std::string> templates = default_templates();
  std::uint64_t rng_seed = 1;

  void validate(const lexic::StopWordList& stops) const {
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(fidelity) || !std::all_of(fidelity_mix.begin(), fidelity_mix.end(), in_unit))
      throw Error(ErrorCode::kInvalidConfig, "fidelity must lie in [0,1]");
    if (templates.empty()) throw Error(ErrorCode::kInvalidConfig, "no sentence templates");
    for (const auto& text : templates) {
      const auto t = Template::parse(text);
      if (t.slot_count() < 2) throw Error(ErrorCode::kInvalidConfig, "template needs two content slots: " + text);
      for (const auto& p : t.parts)
        if (!p.slot && !stops.contains(lexic::normalize(p.literal)))
          throw Error(ErrorCode::kInvalidConfig, "template literal '" + p.literal + "' is not a stop word");
    }
  }
};

struct GuesserBotModel {
  double ability = 0.8;
  double guess_interval_ms = 2500.0;  // mean of exponential gaps
  std::uint64_t rng_seed = 1;

  void validate() const {
    if (ability < 0.0 || ability > 1.0) throw Error(ErrorCode::kInvalidConfig, "ability must lie in [0,1]");
    if (!(guess_interval_ms > 0.0)) throw Error(ErrorCode::kInvalidConfig, "guess interval must be positive");
  }
};

/// Word pools and knobs shared by every bot of a cohort.
struct SimOptions {
  double accuracy_threshold = 0.75;
  /// Off-image words guessers fall back to; defaults to every lexicon word
  /// that is not a stop word.
  std::optional<std::vector<std::string>> global_vocabulary;
  Duration sentence_delay = std::chrono::seconds(5);
  Duration between_rounds = std::chrono::seconds(1);
  server::LoopbackHub::Tap tap;
};

struct SimRound {
  RoundRecord record;
  double fidelity = 0.0;
  double tag_overlap = 0.0;  // share of content norms found in the image tags
  bool accurate = false;
};

struct CohortResult {
  std::vector<SimRound> rounds;
  std::size_t aborted = 0;
};

namespace detail {

struct WordPools {
  std::vector<std::string> objects, attributes, relations, global;
};

inline WordPools make_pools(const quality::Lexicons& lex, const lexic::StopWordList& stops,
                            const std::optional<std::vector<std::string>>& global) {
  WordPools p;
  auto keep = [&](const quality::WordSet& in, std::vector<std::string>& out) {
    for (const auto& w : in)
      if (!stops.contains(w)) out.push_back(w);
  };
  keep(lex.nouns(), p.objects);
  keep(lex.adjectives(), p.attributes);
  keep(lex.relations(), p.relations);
  if (global) {
    for (const auto& w : *global)
      if (auto n = lexic::try_normalize(w); n && !stops.contains(*n)) p.global.push_back(*n);
  } else {
    p.global = p.objects;
    p.global.insert(p.global.end(), p.attributes.begin(), p.attributes.end());
    p.global.insert(p.global.end(), p.relations.begin(), p.relations.end());
  }
  return p;
}

using Cooccurrence = std::unordered_map<std::string, std::unordered_map<std::string, int>>;

inline Cooccurrence cooccurrence(const std::vector<CorpusImage>& corpus) {
  Cooccurrence c;
  for (const auto& img : corpus)
    for (const auto& a : img.tags)
      for (const auto& b : img.tags)
        if (a != b) ++c[a][b];
  return c;
}

/// A bot's view of the game: only what arrived in its own frames.
struct BotView {
  server::ConnectionId conn = 0;
  PlayerId id;
  std::string round_id;
  ImageId image;
  PlayerId leader;
  std::string phase = "idle";
  std::optional<std::int64_t> deadline_ms;
  std::set<std::string> revealed;
  std::set<std::string> guessed;
  bool round_ended = false;

  void consume(const std::vector<std::string>& frames) {
    for (const auto& f : frames) {
      const auto msg = protocol::decode(f);
      const auto& p = msg.payload;
      switch (msg.type) {
        case protocol::MessageType::kState: {
          if (auto s = p.find("session"); s != p.end()) id = s->at("playerId").get<PlayerId>();
          phase = p.at("phase").get<std::string>();
          if (p.contains("roundId") && p["roundId"].get<std::string>() != round_id) {
            round_id = p["roundId"].get<std::string>();
            revealed.clear();
            guessed.clear();
            round_ended = false;
          }
          if (p.contains("imageId")) image = p["imageId"].get<ImageId>();
          if (p.contains("leaderId")) leader = p["leaderId"].get<PlayerId>();
          deadline_ms = (p.contains("deadlineMs") && !p["deadlineMs"].is_null())
                            ? std::optional<std::int64_t>(p["deadlineMs"].get<std::int64_t>())
                            : std::nullopt;
          if (p.contains("mask"))
            for (const auto& m : p["mask"])
              if (m.at("status") == "revealed" && m.contains("text")) revealed.insert(m["text"].get<std::string>());
          break;
        }
        case protocol::MessageType::kReveal: revealed.insert(p.at("word").get<std::string>()); break;
        case protocol::MessageType::kRoundEnd: round_ended = true; break;
        default: break;
      }
    }
  }
};

}  // namespace detail

/// Share of `sentence`'s content norms that are tags of `image`.
inline double tag_overlap(std::string_view sentence, const CorpusImage& image, const lexic::StopWordList& stops) {
  std::set<std::string> norms;
  for (const auto& t : lexic::tokenize(sentence, stops))
    if (t.is_content()) norms.insert(t.norm);
  const auto hits = std::count_if(norms.begin(), norms.end(), [&](const std::string& n) {
    return std::find(image.tags.begin(), image.tags.end(), n) != image.tags.end();
  });
  return static_cast<double>(hits) / static_cast<double>(norms.size());
}

/// Plays `n_rounds` rounds with one bot per guesser model plus one more
/// seat; the leader seat rotates and the remaining seats take the guesser
/// models in order. Deterministic for a given seed.
inline CohortResult run_cohort(const std::vector<CorpusImage>& corpus, std::size_t n_rounds,
                               const LeaderBotModel& leader_model, const std::vector<GuesserBotModel>& guesser_models,
                               const engine::GameConfig& config, std::uint64_t seed, const quality::Lexicons& lex,
                               const SimOptions& options = {},
                               std::shared_ptr<const lexic::StopWordList> stops = nullptr) {
  if (!stops) stops = std::make_shared<lexic::StopWordList>(lexic::StopWordList::builtin());
  if (guesser_models.size() < 2) throw Error(ErrorCode::kInvalidConfig, "need at least 2 guesser models");
  leader_model.validate(*stops);
  for (const auto& g : guesser_models) g.validate();
  if (corpus.empty() || !std::all_of(corpus.begin(), corpus.end(), [](const CorpusImage& i) { return i.has_tags(); }))
    throw Error(ErrorCode::kCorpusWithoutTags, "every simulation image needs tags");

  const auto pools = detail::make_pools(lex, *stops, options.global_vocabulary);
  const auto cooc = detail::cooccurrence(corpus);
  std::map<ImageId, const CorpusImage*> by_id;
  for (const auto& img : corpus) by_id[img.id] = &img;
  std::vector<Template> templates;
  for (const auto& t : leader_model.templates) templates.push_back(Template::parse(t));

  server::LobbyOptions lopts;
  lopts.defaults = config;
  lopts.auto_start = false;
  lopts.intermission = Duration{0};
  lopts.seed = Rng::derive(seed, 0) | 1;
  lopts.image_url_prefix.clear();
  auto memstore = std::make_shared<store::MemoryRoundStore>();
  server::Lobby lobby(lopts, stops, std::make_shared<std::vector<CorpusImage>>(corpus), memstore);
  server::LoopbackHub hub(lobby);
  if (options.tap) hub.set_tap(options.tap);

  Rng leader_rng(Rng::derive(seed ^ leader_model.rng_seed, 1));
  const std::size_t n_bots = guesser_models.size() + 1;
  std::vector<detail::BotView> bots(n_bots);
  TimePoint now = from_epoch_ms(1'700'000'000'000);

  auto pump = [&] {
    for (auto& b : bots) b.consume(hub.drain(b.conn));
  };

  const RoomId room = lobby.create_room(json::object(), now);
  for (auto& b : bots) b.conn = hub.open();
  for (std::size_t i = 0; i < n_bots; ++i) {
    hub.send(bots[i].conn, protocol::MessageType::kJoin,
             {{"roomId", room}, {"displayName", "bot" + std::to_string(i + 1)}}, now);
    pump();
  }

  auto draw_word = [&](const std::vector<std::string>& pool, const std::set<std::string>& exclude) -> std::optional<std::string> {
    std::vector<const std::string*> candidates;
    for (const auto& w : pool)
      if (!exclude.count(w)) candidates.push_back(&w);
    if (candidates.empty()) return std::nullopt;
    return *candidates[leader_rng.index(candidates.size())];
  };

  auto compose = [&](const CorpusImage& img, double fidelity) {
    std::vector<std::string> tag_objects, tag_attributes, tag_relations, tag_content;
    for (const auto& t : img.tags) {
      if (stops->contains(t)) continue;
      tag_content.push_back(t);
      switch (lex.classify(t)) {
        case quality::Role::kNoun: tag_objects.push_back(t); break;
        case quality::Role::kAdjective: tag_attributes.push_back(t); break;
        case quality::Role::kRelation: tag_relations.push_back(t); break;
        default: tag_objects.push_back(t); break;
      }
    }
    const std::set<std::string> tagset(img.tags.begin(), img.tags.end());
    std::set<std::string> used;
    const auto& tmpl = templates[leader_rng.index(templates.size())];
    std::string sentence;
    for (const auto& part : tmpl.parts) {
      std::string word;
      if (!part.slot) {
        word = part.literal;
      } else {
        const auto& truth = *part.slot == Slot::kObject ? tag_objects
                            : *part.slot == Slot::kAttribute ? tag_attributes : tag_relations;
        const auto& pool = *part.slot == Slot::kObject ? pools.objects
                           : *part.slot == Slot::kAttribute ? pools.attributes : pools.relations;
        std::optional<std::string> pick;
        if (leader_rng.bernoulli(fidelity)) {
          pick = draw_word(truth, used);
          if (!pick) pick = draw_word(tag_content, used);
        }
        if (!pick) {
          auto exclude = used;
          exclude.insert(tagset.begin(), tagset.end());
          pick = draw_word(pool, exclude);
        }
        word = pick.value_or("thing");
        used.insert(word);
      }
      if (!sentence.empty()) sentence += ' ';
      sentence += word;
    }
    return sentence;
  };

  std::vector<Rng> guess_rngs;
  for (std::size_t i = 0; i < n_bots; ++i)
    guess_rngs.emplace_back(Rng::derive(seed ^ guesser_models[i % guesser_models.size()].rng_seed, 100 + i));

  auto choose_guess = [&](detail::BotView& bot, const GuesserBotModel& model, Rng& rng) -> std::string {
    const CorpusImage& img = *by_id.at(bot.image);
    std::vector<const std::string*> candidates;
    std::vector<double> weights;
    for (const auto& t : img.tags) {
      if (bot.revealed.count(t) || bot.guessed.count(t) || stops->contains(t)) continue;
      double w = 1.0;
      if (auto it = cooc.find(t); it != cooc.end())
        for (const auto& r : bot.revealed)
          if (auto jt = it->second.find(r); jt != it->second.end()) w += jt->second;
      candidates.push_back(&t);
      weights.push_back(w);
    }
    if (!candidates.empty() && rng.bernoulli(model.ability)) return *candidates[rng.weighted(weights)];
    for (int attempt = 0; attempt < 8; ++attempt) {
      const auto& w = pools.global[rng.index(pools.global.size())];
      if (!bot.guessed.count(w)) return w;
    }
    return pools.global[rng.index(pools.global.size())];
  };

  CohortResult result;
  std::map<std::string, double> fidelity_of_round;
  for (std::size_t round = 0; round < n_rounds; ++round) {
    hub.send(bots[0].conn, protocol::MessageType::kStart, json::object(), now);
    pump();
    auto leader_it = std::find_if(bots.begin(), bots.end(), [&](const auto& b) { return b.id == bots[0].leader; });
    if (bots[0].phase != "awaiting_sentence" || leader_it == bots.end())
      throw Error(ErrorCode::kNotEnoughPlayers, "simulation round failed to start");

    const double fidelity = leader_model.fidelity_mix.empty()
                                ? leader_model.fidelity
                                : leader_model.fidelity_mix[leader_rng.index(leader_model.fidelity_mix.size())];
    const std::string round_id = bots[0].round_id;
    fidelity_of_round[round_id] = fidelity;
    now += options.sentence_delay;
    hub.send(leader_it->conn, protocol::MessageType::kSetSentence,
             {{"sentence", compose(*by_id.at(leader_it->image), fidelity)}}, now);
    pump();

    struct Seat {
      detail::BotView* bot;
      const GuesserBotModel* model;
      Rng* rng;
      TimePoint next;
    };
    std::vector<Seat> seats;
    std::size_t k = 0;
    for (std::size_t i = 0; i < n_bots; ++i) {
      if (&bots[i] == &*leader_it) continue;
      const auto& model = guesser_models[k++];
      seats.push_back({&bots[i], &model, &guess_rngs[i],
                       now + Duration{static_cast<std::int64_t>(guess_rngs[i].exponential(model.guess_interval_ms)) + 1}});
    }

    if (bots[0].phase == "guessing" && bots[0].deadline_ms) {
      const TimePoint deadline = from_epoch_ms(*bots[0].deadline_ms);
      while (!bots[0].round_ended) {
        auto next = std::min_element(seats.begin(), seats.end(), [](const Seat& a, const Seat& b) { return a.next < b.next; });
        if (next->next >= deadline) {
          now = deadline;
          hub.tick(now);
          pump();
          break;
        }
        now = next->next;
        const auto guess = choose_guess(*next->bot, *next->model, *next->rng);
        next->bot->guessed.insert(guess);
        hub.send(next->bot->conn, protocol::MessageType::kGuess, {{"guess", guess}}, now);
        pump();
        next->next = now + Duration{static_cast<std::int64_t>(next->rng->exponential(next->model->guess_interval_ms)) + 1};
      }
    } else {
      // Leader failed to set a sentence: let it time out.
      now += config.sentence_timeout();
      hub.tick(now);
      pump();
    }
    now += options.between_rounds;
  }

  for (auto& rec : memstore->load()) {
    const CorpusImage& img = *by_id.at(rec.image_id);
    SimRound r;
    r.tag_overlap = tag_overlap(rec.raw_sentence, img, *stops);
    r.accurate = r.tag_overlap >= options.accuracy_threshold;
    r.fidelity = fidelity_of_round.count(rec.round_id) ? fidelity_of_round[rec.round_id] : leader_model.fidelity;
    r.record = std::move(rec);
    result.rounds.push_back(std::move(r));
  }
  result.aborted = n_rounds - result.rounds.size();
  return result;
}

struct TrendRow {
  int blanks = 0;
  int count = 0;
  double accurate_fraction = 0.0;
};

struct ExperimentReport {
  std::size_t rounds_simulated = 0;
  std::vector<TrendRow> rows;  // ascending blanks
  std::optional<double> spearman_rho;
  json config;
  std::uint64_t seed = 0;
};

struct LabeledRound {
  int blanks = 0;
  bool accurate = false;
};

inline std::vector<TrendRow> trend_rows(const std::vector<LabeledRound>& rounds) {
  std::map<int, std::pair<int, int>> buckets;
  for (const auto& r : rounds) {
    auto& [n, k] = buckets[r.blanks];
    ++n;
    k += r.accurate;
  }
  std::vector<TrendRow> rows;
  for (const auto& [b, nk] : buckets)
    rows.push_back({b, nk.first, static_cast<double>(nk.second) / nk.first});
  return rows;
}

/// Spearman correlation between bucket blanks value and the bucket's
/// accurate fraction. Needs >= 100 rounds over >= 3 blanks values.
inline ExperimentReport blanks_accuracy_trend(const std::vector<LabeledRound>& rounds) {
  ExperimentReport report;
  report.rounds_simulated = rounds.size();
  report.rows = trend_rows(rounds);
  if (rounds.size() < 100 || report.rows.size() < 3)
    throw Error(ErrorCode::kInsufficientSpread, std::to_string(rounds.size()) + " rounds over " +
                                                    std::to_string(report.rows.size()) + " blanks values");
  std::vector<double> x, y;
  for (const auto& r : report.rows) {
    x.push_back(r.blanks);
    y.push_back(r.accurate_fraction);
  }
  report.spearman_rho = stats::spearman(x, y);
  return report;
}

inline std::vector<LabeledRound> labels_of(const CohortResult& cohort) {
  std::vector<LabeledRound> out;
  for (const auto& r : cohort.rounds) out.push_back({r.record.blanks_remaining, r.accurate});
  return out;
}

inline json report_json(const ExperimentReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"blanks", r.blanks}, {"count", r.count}, {"accurateFraction", r.accurate_fraction}});
  return {{"roundsSimulated", report.rounds_simulated},
          {"rows", rows},
          {"spearmanRho", report.spearman_rho ? json(*report.spearman_rho) : json(nullptr)},
          {"config", report.config},
          {"seed", report.seed}};
}

/// One `simrace run`: a cohort of one leader model and `guessers` identical
/// guesser models, summarized as a blanks/accuracy trend.
struct ExperimentConfig {
  std::size_t rounds = 200;
  double fidelity = 1.0;
  std::vector<double> fidelity_mix;
  double ability = 0.8;
  std::size_t guessers = 3;
  int round_duration_sec = 60;
  double guess_interval_ms = 2500.0;
  double accuracy_threshold = 0.75;
  std::uint64_t seed = 1;
};

inline json to_json_config(const ExperimentConfig& c) {
  return {{"rounds", c.rounds},
          {"fidelity", c.fidelity},
          {"fidelityMix", c.fidelity_mix},
          {"ability", c.ability},
          {"guessers", c.guessers},
          {"roundDurationSec", c.round_duration_sec},
          {"guessIntervalMs", c.guess_interval_ms},
          {"accuracyThreshold", c.accuracy_threshold}};
}

/// Runs the cohort and buckets it. spearmanRho stays null when the rounds
/// do not spread over enough blanks values to rank.
inline ExperimentReport run_experiment(const std::vector<CorpusImage>& corpus, const ExperimentConfig& c,
                                       const quality::Lexicons& lex, SimOptions options = {}) {
  LeaderBotModel leader;
  leader.fidelity = c.fidelity;
  leader.fidelity_mix = c.fidelity_mix;
  std::vector<GuesserBotModel> guessers(c.guessers, GuesserBotModel{c.ability, c.guess_interval_ms, 1});
  engine::GameConfig cfg;
  cfg.round_duration_sec = c.round_duration_sec;
  options.accuracy_threshold = c.accuracy_threshold;
  const auto labels = labels_of(run_cohort(corpus, c.rounds, leader, guessers, cfg, c.seed, lex, options));
  ExperimentReport report;
  try {
    report = blanks_accuracy_trend(labels);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInsufficientSpread) throw;
    report.rounds_simulated = labels.size();
    report.rows = trend_rows(labels);
  }
  report.config = to_json_config(c);
  report.seed = c.seed;
  return report;
}

struct SweepGrid {
  std::vector<double> fidelity{1.0};
  std::vector<double> ability{0.8};
  std::vector<int> round_duration_sec{60};
  std::size_t rounds = 200;
  std::size_t guessers = 3;
  std::uint64_t seed = 1;
  double guess_interval_ms = 2500.0;

  static SweepGrid from_json(const json& j) {
    SweepGrid g;
    g.fidelity = j.value("fidelity", g.fidelity);
    g.ability = j.value("ability", g.ability);
    g.round_duration_sec = j.value("roundDurationSec", g.round_duration_sec);
    g.rounds = j.value("rounds", g.rounds);
    g.guessers = j.value("guessers", g.guessers);
    g.seed = j.value("seed", g.seed);
    g.guess_interval_ms = j.value("guessIntervalMs", g.guess_interval_ms);
    if (g.fidelity.empty() || g.ability.empty() || g.round_duration_sec.empty())
      throw Error(ErrorCode::kInvalidConfig, "sweep grid has an empty axis");
    return g;
  }
};

struct SweepRow {
  double fidelity = 0.0;
  double ability = 0.0;
  int round_duration_sec = 0;
  std::uint64_t seed = 0;
  std::size_t rounds = 0;
  double mean_blanks = 0.0;
  double verified_fraction = 0.0;
};

/// One cohort per grid cell, each with its own derived seed.
inline std::vector<SweepRow> sweep(const std::vector<CorpusImage>& corpus, const SweepGrid& grid,
                                   const quality::Lexicons& lex, const engine::GameConfig& base = {},
                                   const SimOptions& options = {}) {
  std::vector<SweepRow> rows;
  std::uint64_t cell = 0;
  for (double f : grid.fidelity)
    for (double a : grid.ability)
      for (int d : grid.round_duration_sec) {
        SweepRow row{f, a, d, Rng::derive(grid.seed, cell++), 0, 0.0, 0.0};
        engine::GameConfig cfg = base;
        cfg.round_duration_sec = d;
        LeaderBotModel leader;
        leader.fidelity = f;
        std::vector<GuesserBotModel> guessers(grid.guessers, GuesserBotModel{a, grid.guess_interval_ms, 1});
        const auto cohort = run_cohort(corpus, grid.rounds, leader, guessers, cfg, row.seed, lex, options);
        row.rounds = cohort.rounds.size();
        double blanks = 0.0;
        std::size_t verified = 0;
        for (const auto& r : cohort.rounds) {
          blanks += r.record.blanks_remaining;
          verified += r.record.sr_verified;
        }
        if (row.rounds > 0) {
          row.mean_blanks = blanks / static_cast<double>(row.rounds);
          row.verified_fraction = static_cast<double>(verified) / static_cast<double>(row.rounds);
        }
        rows.push_back(row);
      }
  return rows;
}

inline json sweep_json(const std::vector<SweepRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows)
    arr.push_back({{"fidelity", r.fidelity},
                   {"ability", r.ability},
                   {"roundDurationSec", r.round_duration_sec},
                   {"seed", r.seed},
                   {"rounds", r.rounds},
                   {"meanBlanks", r.mean_blanks},
                   {"verifiedFraction", r.verified_fraction}});
  return arr;
}

}  // namespace captionrace::sim
