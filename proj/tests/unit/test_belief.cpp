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

#include "dialoforge/belief.hpp"
#include "dialoforge/errors.hpp"
#include "dialoforge/rng.hpp"

using namespace dialoforge;

TEST_CASE("the train query parses to four slots") {
  const BeliefState b = parse_belief("train ; destination = cambridge ; departure = ely ; day = saturday ; arrive_by = 11:45");
  CHECK(b.domain() == Domain::Train);
  CHECK(b.size() == 4);
  CHECK(b.get("destination") == "cambridge");
  CHECK(b.get("departure") == "ely");
  CHECK(b.get("day") == "saturday");
  CHECK(b.get("arrive_by") == "11:45");
  CHECK(serialize_belief(b) == "train ; arrive_by = 11:45 ; day = saturday ; departure = ely ; destination = cambridge");
}

TEST_CASE("multi-word values and empty states") {
  CHECK(parse_belief("restaurant ; name = pizza hut city centre").get("name") == "pizza hut city centre");
  CHECK(parse_belief("hotel").empty());
  CHECK(serialize_belief(BeliefState(Domain::Police)) == "police");
}

TEST_CASE("syntax errors carry a token position") {
  CHECK_THROWS_AS(parse_belief(""), ParseError);
  CHECK_THROWS_AS(parse_belief("train ; day saturday"), ParseError);
  CHECK_THROWS_AS(parse_belief("train ; day ="), ParseError);
  CHECK_THROWS_AS(parse_belief("spaceship ; day = monday"), UnknownDomain);
  try {
    parse_belief("train ; day = monday ; = x");
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(e.position() == 6);
  }
}

TEST_CASE("a later value for a slot overrides the earlier one") {
  CHECK(parse_belief("hotel ; area = north ; area = south").get("area") == "south");
}

TEST_CASE("repair drops malformed pairs and keeps the rest") {
  CHECK(repair_belief("train ; day = monday ; broken ; arrive_by = 10:00") ==
        parse_belief("train ; arrive_by = 10:00 ; day = monday"));
  CHECK_THROWS_AS(repair_belief("day = monday"), UnparseableBelief);
}

TEST_CASE("diff lists added, removed and changed slots") {
  const BeliefDiff d = diff_belief(parse_belief("restaurant ; food = italian ; area = north"),
                                   parse_belief("restaurant ; food = indian ; pricerange = cheap"));
  CHECK(d.added == std::map<std::string, std::string>{{"pricerange", "cheap"}});
  CHECK(d.removed == std::map<std::string, std::string>{{"area", "north"}});
  CHECK(d.changed.at("food") == std::pair<std::string, std::string>{"italian", "indian"});
}

namespace {

std::string random_word(Rng &rng) {
  static const std::string alphabet = "abcdefghijklmnopqrstuvwxyz0123456789:'_-";
  std::string w;
  const int n = 1 + static_cast<int>(rng.below(8));
  for (int i = 0; i < n; ++i) w += alphabet[rng.below(alphabet.size())];
  return w;
}

}  // namespace

TEST_CASE("property: serialize then parse is the identity") {
  Rng rng(20240501);
  for (int i = 0; i < 2000; ++i) {
    BeliefState s(kAllDomains[rng.below(kAllDomains.size())]);
    const int pairs = static_cast<int>(rng.below(6));
    for (int p = 0; p < pairs; ++p) {
      std::string value = random_word(rng);
      const int extra = static_cast<int>(rng.below(3));
      for (int e = 0; e < extra; ++e) value += " " + random_word(rng);
      s.set(random_word(rng), value);
    }
    REQUIRE(parse_belief(serialize_belief(s)) == s);
  }
}
