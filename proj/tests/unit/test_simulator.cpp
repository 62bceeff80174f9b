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

#include <doctest.h>

#include "dialoforge/errors.hpp"
#include "dialoforge/simulator.hpp"
#include "dialoforge/text.hpp"
#include "fixtures.hpp"

using namespace dialoforge;
using dialoforge::testing::toy;
using dialoforge::testing::toy_models;

namespace {

std::vector<BatchRequest> requests(int n, std::uint64_t seed) {
  std::vector<BatchRequest> out;
  const auto &goals = toy().corpus.goals;
  auto it = goals.begin();
  for (int i = 0; i < n; ++i, ++it) {
    if (it == goals.end()) it = goals.begin();
    out.push_back({"d" + std::to_string(i), it->second, derive_seed(seed, static_cast<std::uint64_t>(i))});
  }
  return out;
}

}  // namespace

TEST_CASE("a dialog replays exactly under its seed") {
  const auto user = toy_models().user_bundle();
  const auto agent = toy_models().agent_bundle();
  SimulationConfig cfg;
  cfg.seed = 3;
  const Dialog a = simulate_dialog(user, agent, toy_train_goal(), toy().kb, toy().templates, cfg, "x");
  const Dialog b = simulate_dialog(user, agent, toy_train_goal(), toy().kb, toy().templates, cfg, "x");
  CHECK(a == b);
  cfg.seed = 4;
  CHECK(simulate_dialog(user, agent, toy_train_goal(), toy().kb, toy().templates, cfg, "x") != a);
}

TEST_CASE("parallel batch equals the serial reference") {
  const auto user = toy_models().user_bundle();
  const auto agent = toy_models().agent_bundle();
  const auto reqs = requests(40, 17);
  const auto serial = simulate_batch_serial(user, agent, reqs, toy().kb, toy().templates, {});
  for (int w : {1, 3, 8}) {
    const auto par = simulate_batch(user, agent, reqs, toy().kb, toy().templates, {}, w);
    REQUIRE(par.size() == serial.size());
    for (std::size_t i = 0; i < par.size(); ++i) {
      CHECK(par[i].dialog == serial[i].dialog);
      CHECK(par[i].error == serial[i].error);
    }
  }
}

TEST_CASE("simulated dialogs keep the structural invariants") {
  const auto user = toy_models().user_bundle();
  const auto agent = toy_models().agent_bundle();
  SimulationConfig cfg;
  cfg.max_turns = 12;
  for (const SimulationOutcome &o : simulate_batch(user, agent, requests(70, 5), toy().kb, toy().templates, cfg, 0)) {
    REQUIRE(o.ok());
    CHECK(o.dialog.source == Provenance::Generated);
    CHECK(o.dialog.turns.size() <= 2 * 12 + 1);
    CHECK(simulated_dialog_violations(o.dialog, toy().kb).empty());
    for (const Turn &t : o.dialog.turns) {
      if (t.speaker == Speaker::Agent) CHECK(static_cast<std::size_t>(t.annotation->kb_count) == query(toy().kb, t.annotation->belief).size());
    }
  }
}

TEST_CASE("property: goal values reach the user turns or the beliefs") {
  const auto user = toy_models().user_bundle();
  const auto agent = toy_models().agent_bundle();
  std::size_t total = 0, grounded = 0;
  const auto reqs = requests(140, 23);
  const auto outcomes = simulate_batch(user, agent, reqs, toy().kb, toy().templates, {}, 0);
  for (std::size_t i = 0; i < reqs.size(); ++i) {
    REQUIRE(outcomes[i].ok());
    for (const GoalSegment &s : reqs[i].goal.segments) {
      for (const ValueGrounding &v : constraint_grounding(outcomes[i].dialog, s.constraints)) {
        ++total;
        grounded += v.in_user || v.in_belief;
      }
    }
  }
  REQUIRE(total > 100);
  CHECK(static_cast<double>(grounded) / static_cast<double>(total) >= 0.70);
}

TEST_CASE("the trace records every turn") {
  const auto user = toy_models().user_bundle();
  const auto agent = toy_models().agent_bundle();
  SimulationConfig cfg;
  cfg.trace = true;
  std::vector<TurnTrace> trace;
  const Dialog d = simulate_dialog(user, agent, toy_train_goal(), toy().kb, toy().templates, cfg, "t", &trace);
  REQUIRE(trace.size() >= d.turns.size() - 1);
  for (const TurnTrace &t : trace) {
    CHECK(t.pool.candidates.size() == t.pool.scores.size());
    CHECK(t.chosen < t.pool.candidates.size());
    if (t.speaker == Speaker::Agent) CHECK(t.belief.has_value());
    CHECK(t.to_json().contains("pool"));
  }
}

TEST_CASE("replay regenerates agent turns on the gold context") {
  const auto agent = toy_models().agent_bundle();
  const Corpus &c = toy().corpus;
  const std::vector<Dialog> refs(c.dialogs.begin(), c.dialogs.begin() + 20);
  const auto out = replay_batch(agent, refs, c.goals, toy().kb, {}, 2);
  for (std::size_t i = 0; i < refs.size(); ++i) {
    REQUIRE(out[i].ok());
    REQUIRE(out[i].dialog.turns.size() == refs[i].turns.size());
    for (std::size_t t = 0; t < refs[i].turns.size(); ++t) {
      CHECK(out[i].dialog.turns[t].speaker == refs[i].turns[t].speaker);
      if (refs[i].turns[t].speaker == Speaker::User) CHECK(out[i].dialog.turns[t].text == refs[i].turns[t].text);
    }
  }
  const auto missing = replay_batch(agent, refs, {}, toy().kb, {}, 1);
  CHECK_FALSE(missing.front().ok());
}

TEST_CASE("configuration errors") {
  SimulationConfig cfg;
  cfg.max_turns = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  BotBundle empty;
  CHECK_THROWS_AS(empty.validate(), InvalidArgument);
  const auto user = toy_models().user_bundle();
  const auto agent = toy_models().agent_bundle();
  CHECK_THROWS_AS(simulate_dialog(user, agent, Goal{"none", {}}, toy().kb, toy().templates, {}, "e"), InvalidArgument);
}
