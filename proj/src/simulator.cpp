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

#include "dialoforge/simulator.hpp"

#include <algorithm>

#include <omp.h>

#include "dialoforge/delex.hpp"
#include "dialoforge/errors.hpp"
#include "dialoforge/text.hpp"

namespace dialoforge {

using nlohmann::json;

void SimulationConfig::validate() const {
  if (max_turns < 1) throw InvalidArgument("max_turns must be at least 1");
  sampling.validate();
}

void BotBundle::validate() const {
  if (!generator) throw InvalidArgument("bot bundle lacks a generator");
  if (role == Role::AgentResponse && !belief) throw InvalidArgument("agent bundle lacks a belief backend");
  if (scorers.empty() && !fallback_scorer) throw InvalidArgument("bot bundle lacks a scorer");
}

const Scorer &BotBundle::scorer(Domain d) const {
  auto it = scorers.find(d);
  if (it != scorers.end() && it->second) return *it->second;
  if (fallback_scorer) return *fallback_scorer;
  throw DegenerateModel("no scorer for domain " + std::string(domain_name(d)));
}

namespace {

json pool_json(const ScoredPool &p) {
  return {{"candidates", p.candidates}, {"scores", p.scores}, {"probs", p.probs}};
}

// Drops empty candidates, keeping the index map back into the pool.
std::vector<std::size_t> usable(const std::vector<std::string> &pool) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (!trim(pool[i]).empty()) idx.push_back(i);
  }
  if (idx.empty()) throw EmptyPool("every candidate in the pool is empty");
  return idx;
}

struct Selection {
  ScoredPool pool;         // usable candidates only
  std::size_t chosen = 0;  // index into pool
  std::string text;
};

Selection select(const Scorer &scorer, const ScoringContext &ctx, Role role, Domain domain,
                 const std::vector<std::string> &pool, SelectionMode mode, Rng &rng) {
  std::vector<std::size_t> idx = usable(pool);
  std::vector<std::string> views;
  views.reserve(idx.size());
  for (std::size_t i : idx) views.push_back(scoring_view(role, domain, trim(pool[i]), ctx.grounding));
  auto [scored, pick] = score_and_select(scorer, ctx, views, mode, rng);
  for (std::size_t k = 0; k < idx.size(); ++k) scored.candidates[k] = trim(pool[idx[k]]);
  std::string text = scored.candidates[pick];
  return {std::move(scored), pick, std::move(text)};
}

BeliefState previous_belief(const std::vector<Turn> &history, Domain domain) {
  for (auto it = history.rbegin(); it != history.rend(); ++it) {
    if (it->annotation) {
      if (it->annotation->belief.domain() == domain) return it->annotation->belief;
      break;
    }
  }
  return BeliefState(domain);
}

BeliefState restrict_to_vocab(const BeliefState &state, const KnowledgeBase &kb) {
  const DomainSlots &vocab = kb.slots(state.domain());
  BeliefState out(state.domain());
  for (const auto &[slot, value] : state.pairs()) {
    if (vocab.contains(slot)) out.set(slot, value);
  }
  return out;
}

}  // namespace

json TurnTrace::to_json() const {
  json j = {{"speaker", speaker_name(speaker)}, {"pool", pool_json(pool)}, {"chosen", chosen}};
  if (belief) j["belief_state"] = *belief;
  if (kb_count) j["kb_count"] = *kb_count;
  if (booking) {
    json b = {{"success", booking->success}};
    if (booking->reference) b["reference"] = *booking->reference;
    if (booking->fee) b["fee"] = *booking->fee;
    j["booking"] = std::move(b);
  }
  if (retry_pool) j["retry_pool"] = pool_json(*retry_pool);
  return j;
}

std::string user_turn(const BotBundle &bot, const Goal &goal, std::size_t segment,
                      const GoalTemplates &templates, const std::vector<Turn> &history,
                      const SimulationConfig &cfg, std::uint64_t seed, TurnTrace *trace) {
  if (bot.role != Role::UserResponse) throw InvalidArgument("user_turn needs a user bundle");
  const GoalSegment &seg = goal.segments.at(segment);
  Conditioning cond = user_conditioning(goal, segment, templates, history);
  SamplingConfig sampling = cfg.sampling;
  sampling.seed = derive_seed(seed, 0);
  std::vector<std::string> pool = generate_pool(*bot.generator, cond, sampling);
  ScoringContext ctx = scoring_context(Role::UserResponse, seg.domain, history, cond.grounding);
  Rng rng(derive_seed(seed, 1));
  Selection sel = select(bot.scorer(seg.domain), ctx, Role::UserResponse, seg.domain, pool,
                         cfg.selection, rng);
  if (trace) {
    trace->speaker = Speaker::User;
    trace->pool = sel.pool;
    trace->chosen = sel.chosen;
  }
  return sel.text;
}

AgentTurn agent_turn(const BotBundle &bot, const std::vector<Turn> &history,
                     const KnowledgeBase &kb, const GoalSegment &segment,
                     const SimulationConfig &cfg, std::uint64_t seed, TurnTrace *trace) {
  if (bot.role != Role::AgentResponse) throw InvalidArgument("agent_turn needs an agent bundle");
  if (history.empty() || history.back().speaker != Speaker::User) {
    throw InvalidArgument("agent_turn needs a history ending with a user turn");
  }
  const Domain domain = segment.domain;
  const std::string &last_user = history.back().text;
  const std::vector<Turn> before(history.begin(), history.end() - 1);

  Conditioning bcond;
  bcond.role = Role::BeliefGeneration;
  bcond.domain = domain;
  bcond.history = before;
  bcond.last_user = last_user;
  bcond.belief = serialize_belief(previous_belief(before, domain));
  BeliefState belief(domain);
  try {
    belief = generate_belief(*bot.belief, bcond);
  } catch (const UnparseableBelief &) {
    try {
      belief = generate_belief(*bot.belief, bcond);
    } catch (const UnparseableBelief &e) {
      throw InvalidDialog(std::string("belief generation failed twice: ") + e.what());
    }
  }
  if (belief.domain() != domain) belief = BeliefState(domain);
  belief = restrict_to_vocab(belief, kb);

  KbSummary summary = summarize(kb, belief);
  AgentTurn out;
  out.belief = belief;
  out.kb_count = summary.count;

  const Scorer &scorer = bot.scorer(domain);
  auto respond = [&](const KbSummary &kb_view, std::uint64_t salt) {
    Conditioning cond = agent_conditioning(domain, before, last_user, belief, kb_view);
    SamplingConfig sampling = cfg.sampling;
    sampling.seed = derive_seed(seed, salt);
    std::vector<std::string> pool = generate_pool(*bot.generator, cond, sampling);
    ScoringContext ctx = scoring_context(Role::AgentResponse, domain, before, cond.grounding);
    ctx.turns.push_back(last_user);
    Rng rng(derive_seed(seed, salt + 1));
    return select(scorer, ctx, Role::AgentResponse, domain, pool, cfg.selection, rng);
  };

  Selection sel = respond(summary, 0);
  if (trace) {
    trace->speaker = Speaker::Agent;
    trace->pool = sel.pool;
    trace->chosen = sel.chosen;
    trace->belief = serialize_belief(belief);
    trace->kb_count = summary.count;
  }
  const std::string reference = placeholder_for(domain, "reference");
  if (summary.count > 0 && sel.text.find(reference) != std::string::npos) {
    std::map<std::string, std::string> booking;
    const DomainSlots &vocab = kb.slots(domain);
    for (const auto &[slot, value] : belief.pairs()) {
      if (vocab.booking.contains(slot)) booking[slot] = value;
    }
    BookingResult result = book(kb, belief, booking, segment, derive_seed(seed, 7));
    out.booking = result;
    if (trace) trace->booking = result;
    if (!result.success) {
      sel = respond(summarize(kb, belief, BookingStatus::Failed), 4);
      if (trace) trace->retry_pool = sel.pool;
    }
  }
  out.text = sel.text;
  return out;
}

Dialog simulate_dialog(const BotBundle &user, const BotBundle &agent, const Goal &goal,
                       const KnowledgeBase &kb, const GoalTemplates &templates,
                       const SimulationConfig &cfg, const std::string &dialog_id,
                       std::vector<TurnTrace> *trace) {
  cfg.validate();
  user.validate();
  agent.validate();
  if (goal.segments.empty()) throw InvalidArgument("goal " + goal.goal_id + " has no segments");
  Dialog dialog;
  dialog.dialog_id = dialog_id;
  dialog.goal_id = goal.goal_id;
  dialog.source = Provenance::Generated;
  std::size_t segment = 0;
  for (int pair = 0; pair < cfg.max_turns; ++pair) {
    const std::uint64_t turn_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(pair));
    TurnTrace ut;
    std::string said = user_turn(user, goal, segment, templates, dialog.turns, cfg,
                                 derive_seed(turn_seed, 0), trace ? &ut : nullptr);
    if (trace) trace->push_back(std::move(ut));
    if (said == kEndOfDialogue) {
      if (segment + 1 < goal.segments.size() && !dialog.turns.empty()) {
        ++segment;
        continue;
      }
      if (!dialog.turns.empty()) {
        dialog.turns.push_back(Turn{Speaker::User, said, std::nullopt});
        dialog.terminated = true;
        break;
      }
      // An opening <eod> carries no conversation; treat the dialog as stalled.
      said = "hello";
    }
    dialog.turns.push_back(Turn{Speaker::User, said, std::nullopt});
    TurnTrace at;
    AgentTurn reply = agent_turn(agent, dialog.turns, kb, goal.segments[segment], cfg,
                                 derive_seed(turn_seed, 1), trace ? &at : nullptr);
    if (trace) trace->push_back(std::move(at));
    dialog.turns.push_back(
        Turn{Speaker::Agent, reply.text, AgentAnnotation{reply.belief, reply.kb_count, reply.booking}});
  }
  return dialog;
}

namespace {

SimulationOutcome run_one(const BotBundle &user, const BotBundle &agent, const BatchRequest &req,
                          const KnowledgeBase &kb, const GoalTemplates &templates,
                          const SimulationConfig &base) {
  SimulationConfig cfg = base;
  cfg.seed = req.seed;
  SimulationOutcome out;
  out.dialog.dialog_id = req.dialog_id;
  out.dialog.goal_id = req.goal.goal_id;
  try {
    out.dialog = simulate_dialog(user, agent, req.goal, kb, templates, cfg, req.dialog_id);
  } catch (const Error &e) {
    out.error = e.code() + ": " + e.what();
  } catch (const std::exception &e) {
    out.error = std::string("InternalError: ") + e.what();
  }
  return out;
}

}  // namespace

std::vector<SimulationOutcome> simulate_batch(const BotBundle &user, const BotBundle &agent,
                                              const std::vector<BatchRequest> &requests,
                                              const KnowledgeBase &kb,
                                              const GoalTemplates &templates,
                                              const SimulationConfig &cfg, int workers) {
  std::vector<SimulationOutcome> out(requests.size());
  const int n = static_cast<int>(requests.size());
  const int threads = workers > 0 ? workers : omp_get_max_threads();
  // Each slot is written by exactly one iteration; run_one never throws.
#pragma omp parallel for num_threads(threads) schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        run_one(user, agent, requests[static_cast<std::size_t>(i)], kb, templates, cfg);
  }
  return out;
}

std::vector<SimulationOutcome> simulate_batch_serial(const BotBundle &user, const BotBundle &agent,
                                                     const std::vector<BatchRequest> &requests,
                                                     const KnowledgeBase &kb,
                                                     const GoalTemplates &templates,
                                                     const SimulationConfig &cfg) {
  std::vector<SimulationOutcome> out;
  out.reserve(requests.size());
  for (const BatchRequest &r : requests) out.push_back(run_one(user, agent, r, kb, templates, cfg));
  return out;
}

Dialog replay_dialog(const BotBundle &agent, const Dialog &reference, const Goal &goal,
                     const KnowledgeBase &kb, const SimulationConfig &cfg, std::uint64_t seed) {
  cfg.validate();
  agent.validate();
  if (goal.segments.empty()) throw InvalidArgument("goal " + goal.goal_id + " has no segments");
  Dialog out{reference.dialog_id, reference.goal_id, {}, reference.terminated, Provenance::Generated};
  for (std::size_t i = 0; i < reference.turns.size(); ++i) {
    const Turn &gold = reference.turns[i];
    if (gold.speaker == Speaker::User) {
      out.turns.push_back(gold);
      continue;
    }
    std::vector<Turn> history(reference.turns.begin(), reference.turns.begin() + static_cast<std::ptrdiff_t>(i));
    if (history.empty() || history.back().speaker != Speaker::User) {
      throw InvalidDialog(reference.dialog_id + ": agent turn " + std::to_string(i) + " does not answer a user turn");
    }
    // Bookings follow the segment the gold annotation was tracking.
    const GoalSegment *segment = &goal.segments.front();
    if (gold.annotation) {
      for (const GoalSegment &s : goal.segments) {
        if (s.domain == gold.annotation->belief.domain()) segment = &s;
      }
    }
    AgentTurn t = agent_turn(agent, history, kb, *segment, cfg, derive_seed(seed, i));
    out.turns.push_back(Turn{Speaker::Agent, std::move(t.text),
                             AgentAnnotation{std::move(t.belief), t.kb_count, std::move(t.booking)}});
  }
  return out;
}

std::vector<SimulationOutcome> replay_batch(const BotBundle &agent, const std::vector<Dialog> &references,
                                            const std::map<std::string, Goal> &goals,
                                            const KnowledgeBase &kb, const SimulationConfig &cfg,
                                            int workers) {
  std::vector<SimulationOutcome> out(references.size());
  const int n = static_cast<int>(references.size());
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for num_threads(threads) schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    const Dialog &ref = references[k];
    SimulationOutcome &o = out[k];
    o.dialog.dialog_id = ref.dialog_id;
    o.dialog.goal_id = ref.goal_id;
    try {
      auto git = goals.find(ref.goal_id);
      if (git == goals.end()) throw SchemaError("dialog " + ref.dialog_id + " references unknown goal " + ref.goal_id);
      o.dialog = replay_dialog(agent, ref, git->second, kb, cfg, derive_seed(cfg.seed, k));
    } catch (const Error &e) {
      o.error = e.code() + ": " + e.what();
    } catch (const std::exception &e) {
      o.error = std::string("InternalError: ") + e.what();
    }
  }
  return out;
}

std::vector<ValueGrounding> constraint_grounding(const Dialog &dialog,
                                                 const std::map<std::string, std::string> &constraints) {
  std::vector<std::string> user_tokens;
  for (const Turn &t : dialog.turns) {
    if (t.speaker != Speaker::User) continue;
    auto toks = tokenize(t.text);
    user_tokens.insert(user_tokens.end(), toks.begin(), toks.end());
    user_tokens.emplace_back();  // no match across turn boundaries
  }
  std::vector<ValueGrounding> out;
  for (const auto &[slot, value] : constraints) {
    ValueGrounding g{slot, value, false, false};
    const auto needle = tokenize(value);
    g.in_user = !needle.empty() &&
                std::search(user_tokens.begin(), user_tokens.end(), needle.begin(), needle.end()) != user_tokens.end();
    for (const Turn &t : dialog.turns) {
      if (t.annotation && t.annotation->belief.get(slot) == value) g.in_belief = true;
    }
    out.push_back(std::move(g));
  }
  return out;
}

bool belief_queries_all(const Dialog &dialog, const std::map<std::string, std::string> &constraints) {
  for (const Turn &t : dialog.turns) {
    if (!t.annotation) continue;
    bool all = true;
    for (const auto &[slot, value] : constraints) all = all && t.annotation->belief.get(slot) == value;
    if (all) return true;
  }
  return false;
}

std::vector<std::string> simulated_dialog_violations(const Dialog &dialog, const KnowledgeBase &kb) {
  std::vector<std::string> out = dialog_violations(dialog);
  for (std::size_t i = 0; i < dialog.turns.size(); ++i) {
    const Turn &t = dialog.turns[i];
    if (t.speaker == Speaker::Agent && !t.annotation) {
      out.push_back("turn " + std::to_string(i) + ": agent turn without belief annotation");
    }
    if (!t.annotation) continue;
    int requery = static_cast<int>(query(kb, t.annotation->belief).size());
    if (requery != t.annotation->kb_count) {
      out.push_back("turn " + std::to_string(i) + ": kb_count " +
                    std::to_string(t.annotation->kb_count) + " but re-query finds " +
                    std::to_string(requery));
    }
  }
  return out;
}

}  // namespace dialoforge
