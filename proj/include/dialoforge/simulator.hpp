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

#ifndef DIALOFORGE_SIMULATOR_HPP_
#define DIALOFORGE_SIMULATOR_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dialoforge/corpus.hpp"
#include "dialoforge/generation.hpp"
#include "dialoforge/goals.hpp"
#include "dialoforge/kb.hpp"
#include "dialoforge/selector.hpp"

namespace dialoforge {

struct SimulationConfig {
  int max_turns = 12;  // user/agent pairs
  SamplingConfig sampling;
  SelectionMode selection = SelectionMode::Argmax;
  std::uint64_t seed = 0;
  bool trace = false;

  // Throws InvalidArgument.
  void validate() const;
};

// Handles to the models one side of the conversation uses. Non-owning: the
// models are immutable and shared by every concurrent dialog.
struct BotBundle {
  Role role = Role::UserResponse;
  const GenerationBackend *generator = nullptr;
  const GenerationBackend *belief = nullptr;  // agent only
  std::map<Domain, const Scorer *> scorers;
  const Scorer *fallback_scorer = nullptr;  // used for domains without a dedicated scorer

  // Throws InvalidArgument when a handle is missing.
  void validate() const;
  const Scorer &scorer(Domain d) const;
};

// Everything a turn decided, for the --trace log.
struct TurnTrace {
  Speaker speaker = Speaker::User;
  ScoredPool pool;
  std::size_t chosen = 0;
  std::optional<std::string> belief;
  std::optional<int> kb_count;
  std::optional<BookingResult> booking;
  std::optional<ScoredPool> retry_pool;  // agent pool regenerated after a failed booking

  nlohmann::json to_json() const;
};

struct AgentTurn {
  std::string text;  // delexicalized
  BeliefState belief;
  int kb_count = 0;
  std::optional<BookingResult> booking;
};

std::string user_turn(const BotBundle &bot, const Goal &goal, std::size_t segment,
                      const GoalTemplates &templates, const std::vector<Turn> &history,
                      const SimulationConfig &cfg, std::uint64_t seed, TurnTrace *trace = nullptr);

// `history` ends with the user turn being answered. The goal segment drives
// booking outcomes only; the agent models never see it.
AgentTurn agent_turn(const BotBundle &bot, const std::vector<Turn> &history,
                     const KnowledgeBase &kb, const GoalSegment &segment,
                     const SimulationConfig &cfg, std::uint64_t seed, TurnTrace *trace = nullptr);

// Segments are played in order; an end-of-dialogue before the last segment
// hands over to the next one. Throws InvalidDialog after a belief failure
// survives one retry.
Dialog simulate_dialog(const BotBundle &user, const BotBundle &agent, const Goal &goal,
                       const KnowledgeBase &kb, const GoalTemplates &templates,
                       const SimulationConfig &cfg, const std::string &dialog_id,
                       std::vector<TurnTrace> *trace = nullptr);

struct SimulationOutcome {
  Dialog dialog;
  std::optional<std::string> error;  // code and message when the dialog failed

  bool ok() const { return !error.has_value(); }
};

struct BatchRequest {
  std::string dialog_id;
  Goal goal;
  std::uint64_t seed = 0;
};

// Dialog i uses requests[i].seed; results are in request order.
std::vector<SimulationOutcome> simulate_batch(const BotBundle &user, const BotBundle &agent,
                                              const std::vector<BatchRequest> &requests,
                                              const KnowledgeBase &kb,
                                              const GoalTemplates &templates,
                                              const SimulationConfig &cfg, int workers);
// Single-threaded reference for the parallel version.
std::vector<SimulationOutcome> simulate_batch_serial(const BotBundle &user, const BotBundle &agent,
                                                     const std::vector<BatchRequest> &requests,
                                                     const KnowledgeBase &kb,
                                                     const GoalTemplates &templates,
                                                     const SimulationConfig &cfg);

// Regenerates every agent turn of a reference dialog from its gold prefix,
// keeping the user turns. The result aligns turn by turn with the reference
// (the input `evaluate` expects). Agent turn i is seeded with
// derive_seed(seed, i); the goal supplies booking outcomes.
Dialog replay_dialog(const BotBundle &agent, const Dialog &reference, const Goal &goal,
                     const KnowledgeBase &kb, const SimulationConfig &cfg, std::uint64_t seed);

// Parallel over dialogs; reference i uses derive_seed(cfg.seed, i). Dialogs
// whose goal is missing from `goals` fail with a SchemaError outcome.
std::vector<SimulationOutcome> replay_batch(const BotBundle &agent, const std::vector<Dialog> &references,
                                            const std::map<std::string, Goal> &goals,
                                            const KnowledgeBase &kb, const SimulationConfig &cfg,
                                            int workers);

// Where a constraint value surfaced in a dialog: in the user's words (as a
// token sequence) and in any recorded agent belief.
struct ValueGrounding {
  std::string slot;
  std::string value;
  bool in_user = false;
  bool in_belief = false;
};

std::vector<ValueGrounding> constraint_grounding(const Dialog &dialog,
                                                 const std::map<std::string, std::string> &constraints);

// True when a single agent belief holds every pair at once.
bool belief_queries_all(const Dialog &dialog, const std::map<std::string, std::string> &constraints);

// Structural invariants plus the kb_count re-query check; empty when valid.
std::vector<std::string> simulated_dialog_violations(const Dialog &dialog, const KnowledgeBase &kb);

}  // namespace dialoforge

#endif  // DIALOFORGE_SIMULATOR_HPP_
