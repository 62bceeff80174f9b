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

#include <fstream>
#include <map>
#include <set>

#include "dialoforge/errors.hpp"
#include "dialoforge/pipeline.hpp"
#include "fixtures.hpp"

using namespace dialoforge;
using dialoforge::testing::toy;

namespace {

std::map<Domain, int> per_domain(const Corpus &c) {
  std::map<Domain, int> n;
  for (const Dialog &d : c.dialogs) ++n[c.goal_of(d).segments.front().domain];
  return n;
}

}  // namespace

TEST_CASE("stratified subsample sizes") {
  CHECK(subsample(toy().corpus, 0.05, 1).dialogs.size() == 7);
  CHECK(subsample(toy().corpus, 0.10, 1).dialogs.size() == 14);
  CHECK(subsample(toy().corpus, 0.5, 1).dialogs.size() == 70);
  CHECK(subsample(toy().corpus, 1.0, 1).dialogs.size() == 140);
  for (const auto &[d, n] : per_domain(subsample(toy().corpus, 0.3, 2))) CHECK(n == 6);
}

TEST_CASE("subsample keeps the original order and replays under a seed") {
  const Corpus a = subsample(toy().corpus, 0.25, 5);
  CHECK(a == subsample(toy().corpus, 0.25, 5));
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < toy().corpus.dialogs.size(); ++i) pos[toy().corpus.dialogs[i].dialog_id] = i;
  for (std::size_t i = 1; i < a.dialogs.size(); ++i) CHECK(pos[a.dialogs[i - 1].dialog_id] < pos[a.dialogs[i].dialog_id]);
  CHECK(a.goals.size() == a.dialogs.size());
}

TEST_CASE("subsample rejects empty strata and bad fractions") {
  CHECK_THROWS_AS(subsample(toy().corpus, 0.01, 1), EmptyStratum);
  CHECK_THROWS_AS(subsample(toy().corpus, 0.0, 1), InvalidArgument);
  CHECK_THROWS_AS(subsample(toy().corpus, 1.5, 1), InvalidArgument);
}

TEST_CASE("augment yields 4N with two-domain multi-goal dialogs") {
  const Corpus seeds = subsample(toy().corpus, 0.1, 3);
  AugmentConfig cfg;
  cfg.seed = 3;
  cfg.workers = 2;
  const AugmentResult r = augment(seeds, toy().kb, toy().templates, cfg);
  CHECK(r.seeds == 14);
  CHECK(r.singles == 14);
  CHECK(r.multis == 28);
  CHECK(r.corpus.dialogs.size() == 56);
  CHECK(r.shortfall == 0);
  std::set<std::string> ids;
  for (const Dialog &d : r.corpus.dialogs) {
    CHECK(ids.insert(d.dialog_id).second);
    CHECK(d.terminated);
    CHECK(dialog_violations(d).empty());
  }
  for (std::size_t i = 28; i < 56; ++i) {
    const Goal &g = r.corpus.goal_of(r.corpus.dialogs[i]);
    REQUIRE(g.segments.size() == 2);
    CHECK(g.segments[0].domain != g.segments[1].domain);
  }
  for (std::size_t i = 0; i < 14; ++i) CHECK(r.corpus.dialogs[i].source == Provenance::Human);
  for (std::size_t i = 14; i < 56; ++i) CHECK(r.corpus.dialogs[i].source == Provenance::Generated);
}

TEST_CASE("augment is deterministic for any worker count") {
  const Corpus seeds = subsample(toy().corpus, 0.05, 4);
  AugmentConfig cfg;
  cfg.seed = 11;
  cfg.workers = 1;
  const AugmentResult a = augment(seeds, toy().kb, toy().templates, cfg);
  cfg.workers = 4;
  const AugmentResult b = augment(seeds, toy().kb, toy().templates, cfg);
  CHECK(a.corpus == b.corpus);
}

TEST_CASE("augment needs two domains") {
  Corpus one;
  for (const Dialog &d : toy().corpus.dialogs) {
    if (toy().corpus.goal_of(d).segments.front().domain == Domain::Taxi) {
      one.dialogs.push_back(d);
      one.goals[d.goal_id] = toy().corpus.goal_of(d);
    }
  }
  CHECK_THROWS_AS(augment(one, toy().kb, toy().templates, {}), InvalidArgument);
  CHECK_THROWS_AS(augment(Corpus{}, toy().kb, toy().templates, {}), EmptyCorpus);
}

TEST_CASE("training export round-trips") {
  dialoforge::testing::TempDir dir("export");
  const Corpus seeds = subsample(toy().corpus, 0.1, 1);
  export_training_set(seeds, toy().kb, ExportStyle::Delexicalized, dir.path());
  Corpus back = load_training_tsv(dir.path() / "turns.tsv");
  CHECK(back.dialogs == seeds.dialogs);
  CHECK(load_corpus(dir.path() / "corpus.jsonl", dir.path() / "goals.json") == seeds);

  export_training_set(seeds, toy().kb, ExportStyle::Lexicalized, dir.path() / "lex");
  const Corpus lex = load_training_tsv(dir.path() / "lex" / "turns.tsv");
  std::size_t leftover = 0;
  for (const Dialog &d : lex.dialogs) {
    for (const Turn &t : d.turns) leftover += t.speaker == Speaker::Agent && t.text.find("[value_") != std::string::npos;
  }
  CHECK(leftover == 0);
}

TEST_CASE("malformed exports are schema errors") {
  dialoforge::testing::TempDir dir("badtsv");
  {
    std::ofstream out(dir.path() / "turns.tsv");
    out << "dialog_id\tgoal_id\n x\ty\n";
  }
  CHECK_THROWS_AS(load_training_tsv(dir.path() / "turns.tsv"), SchemaError);
}
