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

#include <set>

#include "dialoforge/errors.hpp"
#include "dialoforge/rng.hpp"
#include "dialoforge/text.hpp"

using namespace dialoforge;

TEST_CASE("tokenize lower-cases and splits punctuation") {
  CHECK(tokenize("I'd like a Table, please.") == std::vector<std::string>{"i'd", "like", "a", "table", ",", "please", "."});
  CHECK(tokenize("  ") .empty());
}

TEST_CASE("placeholders stay single tokens") {
  const auto toks = tokenize("booked at [restaurant_name], ref [restaurant_reference].");
  CHECK(std::count(toks.begin(), toks.end(), "[restaurant_name]") == 1);
  CHECK(is_placeholder("[value_time]"));
  CHECK(is_valid_placeholder("[value_time]"));
  CHECK_FALSE(is_valid_placeholder("[Value time]"));
  CHECK(find_placeholders("at [value_time] on [value_day] .") == std::vector<std::string>{"[value_time]", "[value_day]"});
}

TEST_CASE("clock parsing") {
  CHECK(parse_clock("11:45") == 11 * 60 + 45);
  CHECK(parse_clock("05:35") == 5 * 60 + 35);
  CHECK_FALSE(parse_clock("25:00").has_value());
  CHECK_FALSE(parse_clock("noon").has_value());
}

TEST_CASE("split, join and trim") {
  CHECK(split("a ; b;c", ';') == std::vector<std::string>{"a ", " b", "c"});
  CHECK(join({"a", "b"}, "-") == "a-b");
  CHECK(trim("  x y \n") == "x y");
}

TEST_CASE("derived seeds are stable and distinct") {
  CHECK(derive_seed(7, 0) == derive_seed(7, 0));
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(42, i));
  CHECK(seen.size() == 1000);
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
}

TEST_CASE("rng uniform stays in [0, 1) and replays under a seed") {
  Rng a(5), b(5);
  for (int i = 0; i < 10000; ++i) {
    const double u = a.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(u == b.uniform());
  }
}
