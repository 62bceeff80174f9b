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

#include "dialoforge/generation.hpp"

#include <cmath>

#include "dialoforge/errors.hpp"
#include "dialoforge/goals.hpp"
#include "dialoforge/text.hpp"

namespace dialoforge {

using nlohmann::json;

std::string_view role_name(Role role) {
  switch (role) {
    case Role::UserResponse: return "user";
    case Role::AgentResponse: return "agent";
    case Role::BeliefGeneration: return "belief";
  }
  return "user";
}

Role role_from_string(std::string_view name) {
  if (name == "user") return Role::UserResponse;
  if (name == "agent") return Role::AgentResponse;
  if (name == "belief") return Role::BeliefGeneration;
  throw SchemaError("unknown role '" + std::string(name) + "'");
}

std::string_view booking_status_name(BookingStatus s) {
  switch (s) {
    case BookingStatus::None: return "none";
    case BookingStatus::Failed: return "fail";
    case BookingStatus::Succeeded: return "ok";
  }
  return "none";
}

void validate_conditioning(const Conditioning &cond) {
  switch (cond.role) {
    case Role::UserResponse:
      if (!cond.goal_text) throw InvalidArgument("user conditioning requires goal text");
      break;
    case Role::AgentResponse:
      if (!cond.last_user || !cond.belief || !cond.kb_summary) {
        throw InvalidArgument("agent conditioning requires last_user, belief and kb_summary");
      }
      break;
    case Role::BeliefGeneration:
      if (!cond.last_user) throw InvalidArgument("belief conditioning requires last_user");
      break;
  }
}

void SamplingConfig::validate() const {
  if (pool_size < 1) throw InvalidArgument("pool_size must be positive");
  if (!(nucleus_p > 0.0 && nucleus_p <= 1.0)) throw InvalidArgument("nucleus_p must lie in (0, 1]");
  if (max_tokens < 1) throw InvalidArgument("max_tokens must be positive");
}

std::string render_history(const std::vector<Turn> &history) {
  std::string out;
  for (const Turn &t : history) {
    if (!out.empty()) out += '\n';
    out += speaker_name(t.speaker);
    out += ": ";
    out += t.text;
  }
  return out;
}

namespace {

std::string render_pairs(const std::map<std::string, std::string> &pairs) {
  std::string out;
  for (const auto &[k, v] : pairs) {
    if (!out.empty()) out += " ; ";
    out += k + " = " + v;
  }
  return out;
}

std::map<std::string, std::string> parse_pairs(std::string_view text) {
  std::map<std::string, std::string> out;
  for (const std::string &part : split(text, ';')) {
    std::string item = trim(part);
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw SchemaError("expected 'key = value' in '" + item + "'");
    out[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
  }
  return out;
}

std::vector<Turn> parse_history(std::string_view text) {
  std::vector<Turn> out;
  for (const std::string &line : split(text, '\n')) {
    if (trim(line).empty()) continue;
    auto colon = line.find(": ");
    if (colon == std::string::npos) throw SchemaError("history line without speaker: '" + line + "'");
    Turn t;
    t.speaker = speaker_from_string(line.substr(0, colon));
    t.text = line.substr(colon + 2);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

std::string render_kb_summary(const KbSummary &kb) {
  std::map<std::string, std::string> pairs(kb.top.begin(), kb.top.end());
  std::string out = "count = " + std::to_string(kb.count) +
                    " ; booking = " + std::string(booking_status_name(kb.booking));
  std::string rest = render_pairs(pairs);
  if (!rest.empty()) out += " ; " + rest;
  return out;
}

json conditioning_to_json(const Conditioning &cond) {
  json j = {{"format", kConditioningFormatVersion},
            {"role", role_name(cond.role)},
            {"domain", domain_name(cond.domain)}};
  if (cond.goal_text) j["goal"] = *cond.goal_text;
  j["history"] = render_history(cond.history);
  if (cond.last_user) j["last_user"] = *cond.last_user;
  if (cond.belief) j["belief"] = *cond.belief;
  if (cond.kb_summary) j["kb_summary"] = render_kb_summary(*cond.kb_summary);
  j["grounding"] = render_pairs(cond.grounding);
  return j;
}

Conditioning conditioning_from_json(const json &j) {
  try {
    Conditioning c;
    c.role = role_from_string(j.at("role").get<std::string>());
    c.domain = domain_from_string(j.at("domain").get<std::string>());
    if (j.contains("goal")) c.goal_text = j["goal"].get<std::string>();
    if (j.contains("history")) c.history = parse_history(j["history"].get<std::string>());
    if (j.contains("last_user")) c.last_user = j["last_user"].get<std::string>();
    if (j.contains("belief")) c.belief = j["belief"].get<std::string>();
    if (j.contains("kb_summary")) {
      auto pairs = parse_pairs(j["kb_summary"].get<std::string>());
      KbSummary kb;
      kb.count = std::stoi(pairs.at("count"));
      const std::string status = pairs.at("booking");
      kb.booking = status == "fail" ? BookingStatus::Failed
                   : status == "ok" ? BookingStatus::Succeeded
                                    : BookingStatus::None;
      pairs.erase("count");
      pairs.erase("booking");
      kb.top = Entity(pairs.begin(), pairs.end());
      c.kb_summary = std::move(kb);
    }
    if (j.contains("grounding")) {
      auto pairs = parse_pairs(j["grounding"].get<std::string>());
      c.grounding = ValueRecord(pairs.begin(), pairs.end());
    }
    return c;
  } catch (const json::exception &e) {
    throw SchemaError(std::string("malformed conditioning: ") + e.what());
  } catch (const std::out_of_range &) {
    throw SchemaError("kb_summary lacks count or booking");
  } catch (const std::invalid_argument &) {
    throw SchemaError("kb_summary count is not an integer");
  }
}

KbSummary summarize(const KnowledgeBase &kb, const BeliefState &belief, BookingStatus status) {
  KbSummary s;
  EntitySet hits = query(kb, belief);
  s.count = static_cast<int>(hits.size());
  if (!hits.empty()) s.top = hits.front();
  s.booking = status;
  return s;
}

Conditioning user_conditioning(const Goal &goal, std::size_t segment,
                               const GoalTemplates &templates, const std::vector<Turn> &history) {
  const GoalSegment &seg = goal.segments.at(segment);
  Conditioning c;
  c.role = Role::UserResponse;
  c.domain = seg.domain;
  c.goal_text = render_goal(Goal{goal.goal_id, {seg}}, templates);
  c.history = history;
  c.grounding = goal_grounding(seg);
  return c;
}

Conditioning agent_conditioning(Domain domain, const std::vector<Turn> &history,
                                const std::string &last_user, const BeliefState &belief,
                                const KbSummary &kb) {
  Conditioning c;
  c.role = Role::AgentResponse;
  c.domain = domain;
  c.history = history;
  c.last_user = last_user;
  c.belief = serialize_belief(belief);
  c.kb_summary = kb;
  c.grounding = agent_grounding(belief, kb);
  return c;
}

ValueRecord agent_grounding(const BeliefState &belief, const KbSummary &kb) {
  ValueRecord g;
  for (const auto &[slot, value] : belief.pairs()) g[slot] = value;
  for (const auto &[slot, value] : kb.top) g[slot] = value;
  if (kb.count > 0 && kb.booking == BookingStatus::None) g["reference"] = "pending";
  return g;
}

std::vector<std::string> generate_pool(const GenerationBackend &backend, const Conditioning &cond,
                                       const SamplingConfig &cfg) {
  if (cond.role == Role::BeliefGeneration) {
    throw InvalidArgument("belief conditioning cannot produce a response pool");
  }
  validate_conditioning(cond);
  cfg.validate();
  std::vector<std::string> pool = backend.generate(cond, cfg);
  if (pool.size() != static_cast<std::size_t>(cfg.pool_size)) {
    throw EmptyPool("backend returned " + std::to_string(pool.size()) + " candidates, expected " +
                    std::to_string(cfg.pool_size));
  }
  return pool;
}

BeliefState generate_belief(const GenerationBackend &backend, const Conditioning &cond) {
  if (cond.role != Role::BeliefGeneration) {
    throw InvalidArgument("generate_belief requires a belief conditioning");
  }
  validate_conditioning(cond);
  std::string raw = backend.belief(cond);
  try {
    return parse_belief(raw);
  } catch (const ParseError &) {
    return repair_belief(raw);
  } catch (const UnknownDomain &) {
    throw UnparseableBelief("generated belief has no known domain: '" + raw + "'");
  }
}

}  // namespace dialoforge
