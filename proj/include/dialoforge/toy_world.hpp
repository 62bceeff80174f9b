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

#ifndef DIALOFORGE_TOY_WORLD_HPP_
#define DIALOFORGE_TOY_WORLD_HPP_

#include <cstdint>
#include <filesystem>

#include "dialoforge/corpus.hpp"
#include "dialoforge/goals.hpp"
#include "dialoforge/kb.hpp"

namespace dialoforge {

// A small Cambridge-style world: seven KB tables, goal templates and a
// scripted, fully annotated corpus. Used by the tests, the benchmarks and the
// `toy-data` command.
struct ToyWorld {
  KnowledgeBase kb;
  GoalTemplates templates;
  Corpus corpus;
};

KnowledgeBase toy_kb();
GoalTemplates toy_templates();

// `per_domain` single-goal dialogs for every domain. Dialog 0 of the train
// domain replays a complete train booking (goal "g1"); dialog 0 of the
// restaurant domain uses goal "g4", the restaurant goal of the perturbation
// study. Deterministic given the seed.
ToyWorld make_toy_world(std::uint64_t seed = 0, int per_domain = 20);

Goal toy_train_goal();       // "g1": ely to cambridge on saturday, arrive by 11:45, 8 people
Goal toy_restaurant_goal();  // "g4": expensive italian, 5 people at 11:30 on sunday, else 10:30
GoalChanges toy_perturbation();  // pricerange=cheap, food=indian, +area=north

// Layout read by the CLI: kb/{kb,slots}.json, goals/{goals,templates}.json,
// corpus.jsonl.
void write_toy_world(const ToyWorld &world, const std::filesystem::path &dir);

}  // namespace dialoforge

#endif  // DIALOFORGE_TOY_WORLD_HPP_
