// Copyright 2026 The dialoforge Authors.
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

#include "dialoforge/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "dialoforge/delex.hpp"
#include "dialoforge/errors.hpp"
#include "dialoforge/generation.hpp"
#include "dialoforge/rng.hpp"
#include "dialoforge/text.hpp"

namespace dialoforge {

Corpus subsample(const Corpus &corpus, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw InvalidArgument("seed fraction must be in (0, 1], got " + std::to_string(fraction));
  }
  std::map<Domain, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < corpus.dialogs.size(); ++i) {
    auto git = corpus.goals.find(corpus.dialogs[i].goal_id);
    if (git == corpus.goals.end() || git->second.segments.size() != 1) continue;
    strata[git->second.segments[0].domain].push_back(i);
  }
  std::vector<std::size_t> keep;
  for (auto &[d, idx] : strata) {
    const auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(idx.size()) + 0.5 + 1e-9));
    if (k == 0) {
      throw EmptyStratum("fraction " + std::to_string(fraction) + " keeps no " + std::string(domain_name(d)) +
                         " dialog out of " + std::to_string(idx.size()));
    }
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(d)));
    std::vector<std::size_t> order = idx;
    for (std::size_t i = 0; i < k; ++i) std::swap(order[i], order[i + rng.below(order.size() - i)]);
    order.resize(k);
    keep.insert(keep.end(), order.begin(), order.end());
  }
  std::sort(keep.begin(), keep.end());
  Corpus out;
  out.split = corpus.split;
  for (std::size_t i : keep) {
    const Dialog &d = corpus.dialogs[i];
    out.dialogs.push_back(d);
    out.goals[d.goal_id] = corpus.goals.at(d.goal_id);
  }
  return out;
}

namespace {

bool usable(const SimulationOutcome &o, const KnowledgeBase &kb) {
  return o.ok() && o.dialog.terminated && simulated_dialog_violations(o.dialog, kb).empty();
}

// Simulates every request, re-running failures under fresh seeds. Slots that
// never succeed stay empty.
std::vector<std::optional<Dialog>> simulate_with_retries(const BotBundle &user, const BotBundle &agent,
                                                         std::vector<BatchRequest> requests,
                                                         const KnowledgeBase &kb, const GoalTemplates &templates,
                                                         const AugmentConfig &cfg,
                                                         std::vector<std::string> &warnings) {
  std::vector<std::optional<Dialog>> out(requests.size());
  std::vector<std::size_t> pending(requests.size());
  std::iota(pending.begin(), pending.end(), 0);
  for (int attempt = 0; attempt <= cfg.retry_budget && !pending.empty(); ++attempt) {
    std::vector<BatchRequest> batch;
    for (std::size_t i : pending) {
      BatchRequest r = requests[i];
      r.seed = derive_seed(r.seed, static_cast<std::uint64_t>(attempt));
      batch.push_back(std::move(r));
    }
    auto results = simulate_batch(user, agent, batch, kb, templates, cfg.simulation, cfg.workers);
    std::vector<std::size_t> still;
    for (std::size_t k = 0; k < pending.size(); ++k) {
      if (usable(results[k], kb)) {
        out[pending[k]] = std::move(results[k].dialog);
      } else {
        still.push_back(pending[k]);
      }
    }
    pending = std::move(still);
  }
  for (std::size_t i : pending) {
    warnings.push_back("dialog " + requests[i].dialog_id + " still invalid after " +
                       std::to_string(cfg.retry_budget + 1) + " attempts");
  }
  return out;
}

std::string numbered(const std::string &prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%05zu", prefix.c_str(), i);
  return buf;
}

}  // namespace

AugmentResult augment(const Corpus &seed_corpus, const KnowledgeBase &kb, const GoalTemplates &templates,
                      const AugmentConfig &cfg, const GenerationBackend *generator) {
  std::vector<const Dialog *> seeds;
  for (const Dialog &d : seed_corpus.dialogs) {
    auto git = seed_corpus.goals.find(d.goal_id);
    if (git != seed_corpus.goals.end() && git->second.segments.size() == 1) seeds.push_back(&d);
  }
  if (seeds.empty()) throw EmptyCorpus("augmentation needs at least one single-goal seed dialog");
  std::map<Domain, std::vector<const Goal *>> by_domain;
  for (const Dialog *d : seeds) {
    const Goal &g = seed_corpus.goals.at(d->goal_id);
    by_domain[g.segments[0].domain].push_back(&g);
  }
  if (by_domain.size() < 2) throw InvalidArgument("multi-goal composition needs seed dialogs from two domains");

  const ModelSet models = ModelSet::train(seed_corpus, kb, templates, [&] {
    ModelTrainConfig t = cfg.train;
    t.seed = derive_seed(cfg.seed, 1);
    return t;
  }());
  const BotBundle user = models.user_bundle(generator);
  const BotBundle agent = models.agent_bundle(generator);
  const std::size_t n = seeds.size();

  AugmentResult r;
  r.corpus.split = seed_corpus.split;
  for (const Dialog *d : seeds) {
    r.corpus.dialogs.push_back(*d);
    r.corpus.goals[d->goal_id] = seed_corpus.goals.at(d->goal_id);
  }
  r.seeds = n;

  std::vector<BatchRequest> singles;
  for (std::size_t i = 0; i < n; ++i) {
    singles.push_back({numbered("sim-single", i), seed_corpus.goals.at(seeds[i]->goal_id),
                       derive_seed(derive_seed(cfg.seed, 2), i)});
  }
  // Pairs for composition: two goals from different domains per output.
  std::vector<BatchRequest> halves;
  std::vector<Domain> domains;
  for (const auto &[d, gs] : by_domain) domains.push_back(d);
  Rng pair_rng(derive_seed(cfg.seed, 3));
  for (std::size_t j = 0; j < 2 * n; ++j) {
    const std::size_t a = pair_rng.below(domains.size());
    std::size_t b = pair_rng.below(domains.size() - 1);
    if (b >= a) ++b;
    const auto &ga = by_domain[domains[a]];
    const auto &gb = by_domain[domains[b]];
    halves.push_back({numbered("sim-multi", j) + "a", *ga[pair_rng.below(ga.size())],
                      derive_seed(derive_seed(cfg.seed, 4), 2 * j)});
    halves.push_back({numbered("sim-multi", j) + "b", *gb[pair_rng.below(gb.size())],
                      derive_seed(derive_seed(cfg.seed, 4), 2 * j + 1)});
  }

  auto single_out = simulate_with_retries(user, agent, singles, kb, templates, cfg, r.warnings);
  for (std::size_t i = 0; i < n; ++i) {
    if (!single_out[i]) {
      ++r.shortfall;
      continue;
    }
    Dialog d = std::move(*single_out[i]);
    d.source = Provenance::Generated;
    r.corpus.dialogs.push_back(std::move(d));
    ++r.singles;
  }
  auto half_out = simulate_with_retries(user, agent, halves, kb, templates, cfg, r.warnings);
  for (std::size_t j = 0; j < 2 * n; ++j) {
    auto &first = half_out[2 * j];
    auto &second = half_out[2 * j + 1];
    if (!first || !second) {
      ++r.shortfall;
      continue;
    }
    auto [goal, dialog] =
        compose_multi_goal(*first, halves[2 * j].goal, *second, halves[2 * j + 1].goal, numbered("sim-multi", j));
    dialog.source = Provenance::Generated;
    r.corpus.goals[goal.goal_id] = std::move(goal);
    r.corpus.dialogs.push_back(std::move(dialog));
    ++r.multis;
  }
  if (r.shortfall > 0 && cfg.strict) {
    throw RetryBudgetExhausted(std::to_string(r.shortfall) + " dialogs could not be generated");
  }
  return r;
}

namespace {

constexpr const char *kTsvHeader = "dialog_id\tgoal_id\tturn\tspeaker\ttext\tbelief\tkb_count\tbooking\tprovenance";

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\\': out += "\\\\"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      const char n = s[++i];
      out += n == 't' ? '\t' : n == 'n' ? '\n' : n;
    } else {
      out += s[i];
    }
  }
  return out;
}

std::string booking_field(const std::optional<BookingResult> &b) {
  if (!b) return "";
  if (!b->success) return "fail";
  return "ok:" + b->reference.value_or("") + ":" + b->fee.value_or("");
}

std::optional<BookingResult> parse_booking_field(const std::string &s) {
  if (s.empty()) return std::nullopt;
  BookingResult b;
  if (s == "fail") return b;
  auto parts = split(s, ':');
  if (parts.size() != 3 || parts[0] != "ok") throw SchemaError("malformed booking field '" + s + "'");
  b.success = true;
  if (!parts[1].empty()) b.reference = parts[1];
  if (!parts[2].empty()) b.fee = parts[2];
  return b;
}

std::string lexicalized(const Turn &t, const KnowledgeBase &kb) {
  if (!t.annotation || !kb.has_domain(t.annotation->belief.domain())) return t.text;
  const AgentAnnotation &a = *t.annotation;
  ValueRecord record = agent_grounding(a.belief, summarize(kb, a.belief));
  record.erase("reference");
  if (a.booking && a.booking->reference) record["reference"] = *a.booking->reference;
  return relexicalize_partial(t.text, record);
}

}  // namespace

void export_training_set(const Corpus &corpus, const KnowledgeBase &kb, ExportStyle style,
                         const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "turns.tsv");
  if (!out) throw SchemaError("cannot write " + (dir / "turns.tsv").string());
  out << kTsvHeader << "\n";
  for (const Dialog &d : corpus.dialogs) {
    const std::string provenance = d.source == Provenance::Human ? "human" : "generated";
    for (std::size_t i = 0; i < d.turns.size(); ++i) {
      const Turn &t = d.turns[i];
      const std::string text = style == ExportStyle::Lexicalized && t.speaker == Speaker::Agent ? lexicalized(t, kb)
                                                                                              : t.text;
      out << escape(d.dialog_id) << '\t' << escape(d.goal_id) << '\t' << i << '\t' << speaker_name(t.speaker)
          << '\t' << escape(text) << '\t' << (t.annotation ? serialize_belief(t.annotation->belief) : "") << '\t'
          << (t.annotation ? std::to_string(t.annotation->kb_count) : "") << '\t'
          << booking_field(t.annotation ? t.annotation->booking : std::nullopt) << '\t' << provenance << "\n";
    }
  }
  save_corpus(corpus, dir / "corpus.jsonl", dir / "goals.json",
              std::string("style=") + (style == ExportStyle::Lexicalized ? "lexicalized" : "delexicalized"));
}

Corpus load_training_tsv(const std::filesystem::path &file) {
  std::ifstream in(file);
  if (!in) throw SchemaError("cannot open " + file.string());
  std::string line;
  if (!std::getline(in, line) || line != kTsvHeader) throw SchemaError(file.string() + ": missing header");
  Corpus c;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f = split(line, '\t');
    if (f.size() != 9) {
      throw SchemaError(file.string() + ":" + std::to_string(line_no) + ": expected 9 fields, got " +
                        std::to_string(f.size()));
    }
    const std::string id = unescape(f[0]);
    if (c.dialogs.empty() || c.dialogs.back().dialog_id != id) {
      Dialog d;
      d.dialog_id = id;
      d.goal_id = unescape(f[1]);
      d.source = f[8] == "human" ? Provenance::Human : Provenance::Generated;
      c.dialogs.push_back(std::move(d));
    }
    Dialog &d = c.dialogs.back();
    Turn t{speaker_from_string(f[3]), unescape(f[4]), std::nullopt};
    if (!f[5].empty()) {
      try {
        t.annotation = AgentAnnotation{parse_belief(f[5]), std::stoi(f[6]), parse_booking_field(f[7])};
      } catch (const std::logic_error &e) {
        throw SchemaError(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
      } catch (const Error &e) {
        throw SchemaError(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (t.is_end_of_dialogue()) d.terminated = true;
    d.turns.push_back(std::move(t));
  }
  return c;
}

}  // namespace dialoforge
