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

#include "dialoforge/models.hpp"

#include <fstream>
#include <vector>

#include <omp.h>

#include "dialoforge/errors.hpp"
#include "dialoforge/rng.hpp"

namespace dialoforge {

using nlohmann::json;

namespace {

FeatureScorer mean_scorer(const std::map<Domain, FeatureScorer> &scorers) {
  FeatureScorer out;
  if (scorers.empty()) return out;
  for (const auto &[d, s] : scorers) {
    for (std::size_t i = 0; i < kFeatureCount; ++i) out.weights()[i] += s.weights()[i];
    out.bias() += s.bias();
  }
  const double n = static_cast<double>(scorers.size());
  for (double &w : out.weights()) w /= n;
  out.bias() /= n;
  return out;
}

json scorers_json(const std::map<Domain, FeatureScorer> &scorers) {
  json j = json::object();
  for (const auto &[d, s] : scorers) j[std::string(domain_name(d))] = s.to_json();
  return j;
}

std::map<Domain, FeatureScorer> scorers_from_json(const json &j) {
  std::map<Domain, FeatureScorer> out;
  for (const auto &[name, s] : j.items()) out[domain_from_string(name)] = FeatureScorer::from_json(s);
  return out;
}

json read_json(const std::filesystem::path &file) {
  std::ifstream in(file);
  if (!in) throw SchemaError("cannot open " + file.string());
  try {
    return json::parse(in);
  } catch (const json::exception &e) {
    throw SchemaError(file.string() + ": " + e.what());
  }
}

}  // namespace

ModelSet ModelSet::train(const Corpus &corpus, const KnowledgeBase &kb, const GoalTemplates &templates,
                         const ModelTrainConfig &cfg) {
  ModelSet m;
  m.backend = NGramBackend::train(corpus, kb, templates, cfg.ngram);
  const std::vector<Domain> domains = m.backend.domains();

  // One scorer per (domain, role), trained independently.
  const int tasks = static_cast<int>(domains.size() * 2);
  std::vector<std::optional<FeatureScorer>> fitted(static_cast<std::size_t>(tasks));
  const int threads = cfg.workers > 0 ? cfg.workers : omp_get_max_threads();
#pragma omp parallel for num_threads(threads) schedule(dynamic)
  for (int t = 0; t < tasks; ++t) {
    const Domain d = domains[static_cast<std::size_t>(t / 2)];
    const Role role = t % 2 == 0 ? Role::UserResponse : Role::AgentResponse;
    try {
      fitted[static_cast<std::size_t>(t)] =
          train_scorer(corpus, kb, role, d, cfg.scorer, derive_seed(cfg.seed, static_cast<std::uint64_t>(t)));
    } catch (const EmptyCorpus &) {
    } catch (const InsufficientCorpus &) {
    }
  }
  for (int t = 0; t < tasks; ++t) {
    auto &slot = fitted[static_cast<std::size_t>(t)];
    if (!slot) continue;
    const Domain d = domains[static_cast<std::size_t>(t / 2)];
    (t % 2 == 0 ? m.user_scorers : m.agent_scorers)[d] = *slot;
  }
  m.fallback_user = mean_scorer(m.user_scorers);
  m.fallback_agent = mean_scorer(m.agent_scorers);
  return m;
}

BotBundle ModelSet::user_bundle(const GenerationBackend *generator, const Scorer *scorer) const {
  BotBundle b;
  b.role = Role::UserResponse;
  b.generator = generator ? generator : &backend;
  if (scorer) {
    b.fallback_scorer = scorer;
    return b;
  }
  for (const auto &[d, s] : user_scorers) b.scorers[d] = &s;
  b.fallback_scorer = &fallback_user;
  return b;
}

BotBundle ModelSet::agent_bundle(const GenerationBackend *generator, const Scorer *scorer) const {
  BotBundle b;
  b.role = Role::AgentResponse;
  b.generator = generator ? generator : &backend;
  b.belief = b.generator;
  if (scorer) {
    b.fallback_scorer = scorer;
    return b;
  }
  for (const auto &[d, s] : agent_scorers) b.scorers[d] = &s;
  b.fallback_scorer = &fallback_agent;
  return b;
}

void ModelSet::save(const std::filesystem::path &dir) const {
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "backend.json") << backend.to_json().dump() << "\n";
  json s = {{"user", scorers_json(user_scorers)},
            {"agent", scorers_json(agent_scorers)},
            {"fallback_user", fallback_user.to_json()},
            {"fallback_agent", fallback_agent.to_json()}};
  std::ofstream(dir / "scorers.json") << s.dump(2) << "\n";
}

ModelSet ModelSet::load(const std::filesystem::path &dir) {
  ModelSet m;
  m.backend = NGramBackend::from_json(read_json(dir / "backend.json"));
  const json s = read_json(dir / "scorers.json");
  try {
    m.user_scorers = scorers_from_json(s.at("user"));
    m.agent_scorers = scorers_from_json(s.at("agent"));
    m.fallback_user = FeatureScorer::from_json(s.at("fallback_user"));
    m.fallback_agent = FeatureScorer::from_json(s.at("fallback_agent"));
  } catch (const json::exception &e) {
    throw SchemaError(std::string("malformed scorers.json: ") + e.what());
  }
  return m;
}

}  // namespace dialoforge
