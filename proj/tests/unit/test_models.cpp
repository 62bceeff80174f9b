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
#include "dialoforge/generation.hpp"
#include "dialoforge/models.hpp"
#include "dialoforge/text.hpp"
#include "fixtures.hpp"

using namespace dialoforge;
using dialoforge::testing::toy;
using dialoforge::testing::toy_models;

TEST_CASE("every domain gets both scorers on the toy corpus") {
  for (Domain d : kAllDomains) {
    CHECK(toy_models().user_scorers.contains(d));
    CHECK(toy_models().agent_scorers.contains(d));
  }
}

TEST_CASE("parallel scorer training equals the serial run") {
  ModelTrainConfig cfg;
  cfg.workers = 1;
  const ModelSet serial = ModelSet::train(toy().corpus, toy().kb, toy().templates, cfg);
  cfg.workers = 4;
  const ModelSet parallel = ModelSet::train(toy().corpus, toy().kb, toy().templates, cfg);
  CHECK(serial.user_scorers == parallel.user_scorers);
  CHECK(serial.agent_scorers == parallel.agent_scorers);
  CHECK(serial.fallback_agent == parallel.fallback_agent);
}

TEST_CASE("models save and load without loss") {
  dialoforge::testing::TempDir dir("models");
  toy_models().save(dir.path());
  const ModelSet back = ModelSet::load(dir.path());
  CHECK(back.user_scorers == toy_models().user_scorers);
  CHECK(back.agent_scorers == toy_models().agent_scorers);
  Conditioning c = user_conditioning(toy_train_goal(), 0, toy().templates, {});
  SamplingConfig s;
  s.seed = 5;
  CHECK(back.backend.generate(c, s) == toy_models().backend.generate(c, s));
  CHECK_THROWS_AS(ModelSet::load(dir.path() / "missing"), SchemaError);
}

TEST_CASE("pools have the requested size and replay under a seed") {
  Conditioning c = user_conditioning(toy_restaurant_goal(), 0, toy().templates, {});
  for (int r : {1, 3, 5, 8}) {
    SamplingConfig s;
    s.pool_size = r;
    s.seed = 9;
    const auto pool = generate_pool(toy_models().backend, c, s);
    CHECK(pool.size() == static_cast<std::size_t>(r));
    CHECK(pool == generate_pool(toy_models().backend, c, s));
  }
}

TEST_CASE("max_tokens caps every candidate") {
  Conditioning c = user_conditioning(toy_restaurant_goal(), 0, toy().templates, {});
  SamplingConfig s;
  s.max_tokens = 4;
  for (const std::string &cand : generate_pool(toy_models().backend, c, s)) CHECK(tokenize(cand).size() <= 4);
}

TEST_CASE("the belief generator tracks the train request") {
  const std::vector<Turn> history{Turn{Speaker::User, "i need a train from ely to cambridge on saturday .", std::nullopt}};
  const BeliefState empty(Domain::Train);
  Conditioning c = agent_conditioning(Domain::Train, history, history.back().text, empty, summarize(toy().kb, empty));
  c.role = Role::BeliefGeneration;
  const BeliefState b = generate_belief(toy_models().backend, c);
  CHECK(b.domain() == Domain::Train);
  CHECK(b.get("departure") == "ely");
  CHECK(b.get("destination") == "cambridge");
  CHECK(b.get("day") == "saturday");
}

TEST_CASE("conditioning json round-trip") {
  const std::vector<Turn> history{Turn{Speaker::User, "a cheap place please .", std::nullopt}};
  const BeliefState b = parse_belief("restaurant ; pricerange = cheap");
  const Conditioning c = agent_conditioning(Domain::Restaurant, history, history.back().text, b, summarize(toy().kb, b));
  const Conditioning back = conditioning_from_json(conditioning_to_json(c));
  CHECK(back.role == c.role);
  CHECK(back.domain == c.domain);
  CHECK(back.history == c.history);
  CHECK(back.belief == c.belief);
  CHECK(back.kb_summary->count == c.kb_summary->count);
  CHECK_THROWS_AS(conditioning_from_json(nlohmann::json::object()), SchemaError);
}
