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

#include <cstdlib>

#include "backend_server.hpp"
#include "dialoforge/errors.hpp"
#include "dialoforge/remote.hpp"
#include "dialoforge/simulator.hpp"
#include "fixtures.hpp"

using namespace dialoforge;
using dialoforge::testing::BackendServer;
using dialoforge::testing::toy;
using dialoforge::testing::toy_models;

namespace {

RemoteConfig config_for(const BackendServer &server) {
  RemoteConfig cfg;
  cfg.url = server.url();
  cfg.timeout_ms = 5000;
  return cfg;
}

// Drops the last candidate so pool_size is never honored.
class ShortPoolBackend : public GenerationBackend {
 public:
  explicit ShortPoolBackend(const GenerationBackend &inner) : inner_(inner) {}
  std::vector<std::string> generate(const Conditioning &c, const SamplingConfig &s) const override {
    auto pool = inner_.generate(c, s);
    pool.pop_back();
    return pool;
  }
  std::string belief(const Conditioning &c) const override { return inner_.belief(c); }

 private:
  const GenerationBackend &inner_;
};

}  // namespace

TEST_CASE("the reference server passes every conformance check") {
  BackendServer server(toy_models().backend, toy_models().fallback_agent);
  const auto checks = serve_check(config_for(server));
  CHECK(checks.size() >= 8);
  for (const ConformanceCheck &c : checks) CHECK_MESSAGE(c.passed, c.name << ": " << c.detail);
}

TEST_CASE("a server that shortens pools fails the pool_size check") {
  ShortPoolBackend broken(toy_models().backend);
  BackendServer server(broken, toy_models().fallback_agent);
  bool pool_failed = false;
  for (const ConformanceCheck &c : serve_check(config_for(server))) {
    if (c.name == "generate_pool_size") pool_failed = !c.passed;
  }
  CHECK(pool_failed);
}

TEST_CASE("remote generation equals local generation") {
  BackendServer server(toy_models().backend, toy_models().fallback_agent);
  const RemoteBackend remote(config_for(server));
  const RemoteScorer scorer(config_for(server));
  const auto user_local = toy_models().user_bundle();
  const auto agent_local = toy_models().agent_bundle();
  const auto user_remote = toy_models().user_bundle(&remote);
  const auto agent_remote = toy_models().agent_bundle(&remote);
  SimulationConfig cfg;
  for (std::uint64_t seed : {1, 2, 3}) {
    cfg.seed = seed;
    const Dialog a = simulate_dialog(user_local, agent_local, toy_train_goal(), toy().kb, toy().templates, cfg, "r");
    const Dialog b = simulate_dialog(user_remote, agent_remote, toy_train_goal(), toy().kb, toy().templates, cfg, "r");
    CHECK(a == b);
  }
  const ScoringContext ctx{{"i need a train ."}, {{"day", "monday"}}};
  CHECK(scorer.score(ctx, "what day ?") == doctest::Approx(toy_models().fallback_agent.score(ctx, "what day ?")).epsilon(1e-12));
}

TEST_CASE("remote batches run concurrently and match the serial run") {
  BackendServer server(toy_models().backend, toy_models().fallback_agent);
  const RemoteBackend remote(config_for(server));
  const auto user = toy_models().user_bundle(&remote);
  const auto agent = toy_models().agent_bundle(&remote);
  std::vector<BatchRequest> reqs;
  for (int i = 0; i < 8; ++i) reqs.push_back({"c" + std::to_string(i), toy_restaurant_goal(), static_cast<std::uint64_t>(i)});
  const auto par = simulate_batch(user, agent, reqs, toy().kb, toy().templates, {}, 4);
  const auto ser = simulate_batch_serial(user, agent, reqs, toy().kb, toy().templates, {});
  for (std::size_t i = 0; i < reqs.size(); ++i) {
    CHECK(par[i].ok());
    CHECK(par[i].dialog == ser[i].dialog);
  }
}

TEST_CASE("an unreachable backend is reported as unavailable") {
  RemoteConfig cfg;
  {
    BackendServer server(toy_models().backend, toy_models().fallback_agent);
    cfg = config_for(server);
  }
  cfg.timeout_ms = 300;
  cfg.retries = 1;
  const RemoteBackend remote(cfg);
  Conditioning c;
  c.goal_text = "You are looking for a train.";
  CHECK_THROWS_AS(remote.generate(c, {}), BackendUnavailable);
  bool all_failed = true;
  for (const ConformanceCheck &check : serve_check(cfg)) all_failed = all_failed && !check.passed;
  CHECK(all_failed);
}

TEST_CASE("client errors surface as 4xx") {
  BackendServer server(toy_models().backend, toy_models().fallback_agent);
  nlohmann::json body = generate_request(Conditioning{}, SamplingConfig{});
  body["pool_size"] = 0;
  CHECK_THROWS_AS(post_json(config_for(server), "/generate", body), BackendUnavailable);
}

TEST_CASE("configuration from the environment") {
  ::unsetenv(kBackendUrlEnv);
  ::unsetenv(kBackendTimeoutEnv);
  CHECK_FALSE(RemoteConfig::resolve().has_value());
  ::setenv(kBackendUrlEnv, "http://127.0.0.1:9", 1);
  ::setenv(kBackendTimeoutEnv, "250", 1);
  auto cfg = RemoteConfig::resolve();
  REQUIRE(cfg.has_value());
  CHECK(cfg->url == "http://127.0.0.1:9");
  CHECK(cfg->timeout_ms == 250);
  CHECK(RemoteConfig::resolve(std::string("http://h:1"), 40)->timeout_ms == 40);
  ::setenv(kBackendTimeoutEnv, "soon", 1);
  CHECK_THROWS_AS(RemoteConfig::resolve(), InvalidArgument);
  ::unsetenv(kBackendUrlEnv);
  ::unsetenv(kBackendTimeoutEnv);
  RemoteConfig bad;
  bad.url = "ftp://x";
  CHECK_THROWS_AS(post_json(bad, "/generate", {}), InvalidArgument);
}

TEST_CASE("score requests carry context and grounding") {
  const ScoringContext ctx{{"a", "b"}, {{"food", "indian"}, {"area", "north"}}};
  const auto j = score_request(ctx, "c");
  CHECK(j.at("context") == "a\nb");
  CHECK(j.at("candidate") == "c");
  const ScoringContext back = scoring_context_from_json(j);
  CHECK(back.turns == ctx.turns);
  CHECK(back.grounding == ctx.grounding);
}
