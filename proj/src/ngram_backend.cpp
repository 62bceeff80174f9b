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

#include "dialoforge/ngram_backend.hpp"

#include <omp.h>

#include "dialoforge/delex.hpp"
#include "dialoforge/errors.hpp"
#include "dialoforge/rng.hpp"
#include "dialoforge/text.hpp"

namespace dialoforge {

using nlohmann::json;

namespace {

constexpr std::string_view kUserMarker = "<u>";
constexpr std::string_view kAgentMarker = "<a>";

std::vector<std::string> user_view(const ValueTagger &tagger, Domain d, std::string_view text) {
  return tagger.delexicalize(d, tokenize(text));
}

}  // namespace

std::string kb_bucket(const KbSummary &kb) {
  if (kb.booking == BookingStatus::Failed) return "book_fail";
  if (kb.booking == BookingStatus::Succeeded) return "book_ok";
  if (kb.count <= 0) return "kb_none";
  if (kb.count == 1) return "kb_one";
  if (kb.count <= 5) return "kb_few";
  return "kb_many";
}

std::vector<std::string> conditioning_tokens(const Conditioning &cond, const ValueTagger &tagger,
                                             int history_budget) {
  std::vector<std::string> head;
  if (cond.goal_text) {
    head.emplace_back("<goal>");
    for (auto &t : tokenize(*cond.goal_text)) head.push_back(std::move(t));
  }
  std::vector<std::string> tail;
  if (cond.belief) {
    tail.emplace_back("<belief>");
    for (auto &t : tokenize(*cond.belief)) tail.push_back(std::move(t));
  }
  if (cond.kb_summary) {
    tail.emplace_back("<kb>");
    tail.push_back(kb_bucket(*cond.kb_summary));
  }
  if (cond.last_user) {
    tail.emplace_back("<last_user>");
    for (auto &t : user_view(tagger, cond.domain, *cond.last_user)) tail.push_back(std::move(t));
  }
  switch (cond.role) {
    case Role::UserResponse: tail.emplace_back("<user>"); break;
    case Role::AgentResponse: tail.push_back("<agent:" + kb_bucket(*cond.kb_summary) + ">"); break;
    case Role::BeliefGeneration: tail.emplace_back("<state>"); break;
  }

  // Most recent turns first until the budget is spent.
  std::vector<std::vector<std::string>> turns;
  long budget = history_budget - static_cast<long>(head.size() + tail.size()) - 1;
  for (auto it = cond.history.rbegin(); it != cond.history.rend(); ++it) {
    std::vector<std::string> toks;
    toks.emplace_back(it->speaker == Speaker::User ? kUserMarker : kAgentMarker);
    std::vector<std::string> body = it->speaker == Speaker::User
                                        ? user_view(tagger, cond.domain, it->text)
                                        : tokenize(it->text);
    toks.insert(toks.end(), body.begin(), body.end());
    if (static_cast<long>(toks.size()) > budget) break;
    budget -= static_cast<long>(toks.size());
    turns.push_back(std::move(toks));
  }
  std::vector<std::string> out = std::move(head);
  out.emplace_back("<history>");
  for (auto it = turns.rbegin(); it != turns.rend(); ++it) out.insert(out.end(), it->begin(), it->end());
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

std::map<Domain, RoleExamples> backend_examples(const Corpus &corpus, const KnowledgeBase &kb,
                                                const GoalTemplates &templates,
                                                const ValueTagger &tagger, int history_budget) {
  std::map<Domain, RoleExamples> out;
  for (const Dialog &dlg : corpus.dialogs) {
    auto git = corpus.goals.find(dlg.goal_id);
    if (git == corpus.goals.end() || git->second.segments.size() != 1) continue;
    const Goal &goal = git->second;
    const GoalSegment &seg = goal.segments[0];
    if (!kb.has_domain(seg.domain)) continue;
    const ValueRecord grounding = goal_grounding(seg);
    RoleExamples &ex = out[seg.domain];
    for (std::size_t i = 0; i < dlg.turns.size(); ++i) {
      const Turn &t = dlg.turns[i];
      std::vector<Turn> history(dlg.turns.begin(), dlg.turns.begin() + static_cast<std::ptrdiff_t>(i));
      if (t.speaker == Speaker::User) {
        Conditioning c = user_conditioning(goal, 0, templates, history);
        std::string target = t.is_end_of_dialogue() ? std::string(kEndOfDialogue)
                                                    : delexicalize(t.text, grounding, seg.domain);
        ex.user.push_back({conditioning_tokens(c, tagger, history_budget), tokenize(target)});
      } else if (t.annotation && i > 0) {
        const AgentAnnotation &a = *t.annotation;
        if (a.belief.domain() != seg.domain) continue;
        BookingStatus status = a.booking && !a.booking->success ? BookingStatus::Failed
                                                                : BookingStatus::None;
        KbSummary summary = summarize(kb, a.belief, status);
        history.pop_back();
        Conditioning c = agent_conditioning(seg.domain, history, dlg.turns[i - 1].text, a.belief, summary);
        ex.agent.push_back({conditioning_tokens(c, tagger, history_budget), tokenize(t.text)});
      }
    }
  }
  return out;
}

NGramBackend NGramBackend::train(const Corpus &corpus, const KnowledgeBase &kb,
                                 const GoalTemplates &templates, const NGramBackendConfig &cfg) {
  NGramBackend backend;
  backend.cfg_ = cfg;
  backend.tagger_ = ValueTagger::build(kb, corpus);
  std::map<Domain, RoleExamples> examples =
      backend_examples(corpus, kb, templates, backend.tagger_, cfg.history_budget);
  std::vector<Domain> domains;
  for (const auto &[d, ex] : examples) {
    if (!ex.user.empty() && !ex.agent.empty()) domains.push_back(d);
  }
  if (domains.empty()) throw EmptyCorpus("no single-goal dialogs with agent annotations to train on");

  std::vector<DomainModels> fitted(domains.size(),
                                   DomainModels{NGramModel(cfg.order, cfg.k), NGramModel(cfg.order, cfg.k)});
  // One task per (domain, role) model; every model only reads shared data.
  const int tasks = static_cast<int>(domains.size() * 2);
#pragma omp parallel for schedule(dynamic)
  for (int task = 0; task < tasks; ++task) {
    const std::size_t d = static_cast<std::size_t>(task / 2);
    const RoleExamples &ex = examples.at(domains[d]);
    if (task % 2 == 0) {
      fitted[d].user.fit(ex.user);
    } else {
      fitted[d].agent.fit(ex.agent);
    }
  }
  for (std::size_t d = 0; d < domains.size(); ++d) backend.models_.emplace(domains[d], std::move(fitted[d]));
  return backend;
}

std::vector<Domain> NGramBackend::domains() const {
  std::vector<Domain> out;
  for (const auto &[d, m] : models_) out.push_back(d);
  return out;
}

const NGramModel &NGramBackend::model(Domain d, Role role) const {
  auto it = models_.find(d);
  if (it == models_.end()) {
    throw DegenerateModel("no trained model for domain " + std::string(domain_name(d)));
  }
  if (role == Role::BeliefGeneration) throw InvalidArgument("beliefs are tracked, not sampled");
  return role == Role::UserResponse ? it->second.user : it->second.agent;
}

namespace {

bool placeholder_allowed(std::string_view token, Domain domain, const ValueRecord &grounding) {
  std::string_view body = token.substr(1, token.size() - 2);
  if (!body.starts_with("value_")) {
    auto us = body.find('_');
    if (us == std::string_view::npos || body.substr(0, us) != domain_name(domain)) return false;
  }
  std::string slot = slot_for_placeholder(token);
  return grounding.contains(slot) || (slot == "people" && grounding.contains("count"));
}

}  // namespace

std::vector<std::string> NGramBackend::generate(const Conditioning &cond,
                                                const SamplingConfig &cfg) const {
  const NGramModel &m = model(cond.domain, cond.role);
  const std::vector<int> prefix = m.encode(conditioning_tokens(cond, tagger_, cfg_.history_budget));

  std::vector<bool> blocked(m.vocab_size(), false);
  for (std::size_t id = 0; id < m.vocab_size(); ++id) {
    const std::string &tok = m.token(static_cast<int>(id));
    if (is_placeholder(tok)) blocked[id] = !placeholder_allowed(tok, cond.domain, cond.grounding);
  }
  const int eos = m.token_id(kEndOfSequence);
  const int eod = m.token_id(kEndOfDialogue);

  std::vector<std::string> pool;
  pool.reserve(static_cast<std::size_t>(cfg.pool_size));
  for (int i = 0; i < cfg.pool_size; ++i) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(i)));
    std::vector<int> ids = prefix;
    std::vector<std::string> out;
    for (int step = 0; step < cfg.max_tokens; ++step) {
      std::vector<double> dist = m.distribution(std::span<const int>(ids));
      double total = 0.0;
      for (std::size_t id = 0; id < dist.size(); ++id) {
        const int sid = static_cast<int>(id);
        if (blocked[id] || (step == 0 && sid == eos) || (step > 0 && sid == eod)) dist[id] = 0.0;
        total += dist[id];
      }
      if (total <= 0.0) break;
      for (double &p : dist) p /= total;
      const int next = static_cast<int>(nucleus_sample(dist, cfg.nucleus_p, rng));
      if (next == eos) break;
      out.push_back(m.token(next));
      ids.push_back(next);
      if (next == eod) break;
    }
    std::string text = join(out);
    if (cond.role == Role::UserResponse) text = relexicalize_partial(text, cond.grounding);
    pool.push_back(std::move(text));
  }
  return pool;
}

std::string NGramBackend::belief(const Conditioning &cond) const {
  BeliefState previous(cond.domain);
  if (cond.belief && !trim(*cond.belief).empty()) {
    BeliefState parsed = parse_belief(*cond.belief);
    if (parsed.domain() == cond.domain) previous = parsed;
  }
  return serialize_belief(tagger_.track(previous, cond.last_user.value_or("")));
}

json NGramBackend::to_json() const {
  json models = json::object();
  for (const auto &[d, m] : models_) {
    models[std::string(domain_name(d))] = {{"user", m.user.to_json()}, {"agent", m.agent.to_json()}};
  }
  return {{"format", 1},
          {"order", cfg_.order},
          {"k", cfg_.k},
          {"history_budget", cfg_.history_budget},
          {"tagger", tagger_.to_json()},
          {"models", std::move(models)}};
}

NGramBackend NGramBackend::from_json(const json &j) {
  NGramBackend b;
  try {
    b.cfg_.order = j.at("order").get<int>();
    b.cfg_.k = j.at("k").get<double>();
    b.cfg_.history_budget = j.at("history_budget").get<int>();
    b.tagger_ = ValueTagger::from_json(j.at("tagger"));
    for (const auto &[name, m] : j.at("models").items()) {
      b.models_.emplace(domain_from_string(name),
                        DomainModels{NGramModel::from_json(m.at("user")),
                                     NGramModel::from_json(m.at("agent"))});
    }
  } catch (const json::exception &e) {
    throw SchemaError(std::string("malformed backend model: ") + e.what());
  }
  return b;
}

}  // namespace dialoforge
