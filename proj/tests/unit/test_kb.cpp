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
#include "dialoforge/kb.hpp"
#include "fixtures.hpp"

using namespace dialoforge;
using dialoforge::testing::toy;

TEST_CASE("slot matching rules") {
  CHECK(slot_matches("food", "indian", "indian"));
  CHECK_FALSE(slot_matches("food", "indian", "italian"));
  CHECK(slot_matches("food", "indian", "dontcare"));
  CHECK(slot_matches("arrive_by", "11:30", "11:45"));
  CHECK_FALSE(slot_matches("arrive_by", "12:00", "11:45"));
  CHECK(slot_matches("leave_at", "09:15", "09:00"));
  CHECK_FALSE(slot_matches("leave_at", "08:59", "09:00"));
}

TEST_CASE("queries filter on every constraint") {
  const KnowledgeBase &kb = toy().kb;
  const EntitySet cheap_indian_north = query(kb, parse_belief("restaurant ; food = indian ; pricerange = cheap ; area = north"));
  REQUIRE(cheap_indian_north.size() >= 1);
  for (const Entity *e : cheap_indian_north.entities) {
    CHECK(e->at("food") == "indian");
    CHECK(e->at("area") == "north");
  }
  CHECK(query(kb, parse_belief("restaurant ; food = italian ; pricerange = expensive")).size() == 2);
  CHECK(query(kb, BeliefState(Domain::Restaurant)).size() == kb.table(Domain::Restaurant).size());
  CHECK_THROWS_AS(query(kb, parse_belief("restaurant ; colour = red")), UnknownSlot);
}

TEST_CASE("property: every returned entity satisfies every constraint") {
  const KnowledgeBase &kb = toy().kb;
  Rng rng(99);
  for (int i = 0; i < 300; ++i) {
    const Domain d = kAllDomains[rng.below(kAllDomains.size())];
    const auto &table = kb.table(d);
    const Entity &pivot = table[rng.below(table.size())];
    BeliefState s(d);
    for (const std::string &slot : kb.slots(d).informable) {
      if (pivot.contains(slot) && rng.bernoulli(0.5)) s.set(slot, pivot.at(slot));
    }
    const EntitySet hits = query(kb, s);
    REQUIRE_FALSE(hits.empty());
    for (const Entity *e : hits.entities) {
      for (const auto &[slot, value] : s.pairs()) REQUIRE(slot_matches(slot, e->at(slot), value));
    }
  }
}

TEST_CASE("bookings fail on the primary fallback value and succeed after it") {
  const KnowledgeBase &kb = toy().kb;
  const GoalSegment seg = toy_restaurant_goal().segments.front();
  const BeliefState state = parse_belief("restaurant ; food = italian ; pricerange = expensive");
  const BookingResult first = book(kb, state, {{"people", "5"}, {"time", "11:30"}, {"day", "sunday"}}, seg, 1);
  CHECK_FALSE(first.success);
  CHECK_FALSE(first.reference.has_value());
  const BookingResult second = book(kb, state, {{"people", "5"}, {"time", "10:30"}, {"day", "sunday"}}, seg, 1);
  CHECK(second.success);
  REQUIRE(second.reference.has_value());
  CHECK(second.reference->size() == 8);
  CHECK(*second.reference == make_reference(1));
  CHECK_THROWS_AS(book(kb, parse_belief("restaurant ; food = martian"), {}, seg, 1), NoMatchingEntity);
}

TEST_CASE("kb save and load round-trip") {
  dialoforge::testing::TempDir dir("kb");
  save_kb(toy().kb, dir.path());
  const KnowledgeBase back = load_kb(dir.path());
  CHECK(back.tables() == toy().kb.tables());
  CHECK(back.slot_vocab().size() == toy().kb.slot_vocab().size());
  CHECK_THROWS_AS(load_kb(dir.path() / "missing"), SchemaError);
}
