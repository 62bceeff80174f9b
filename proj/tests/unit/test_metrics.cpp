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

#include <algorithm>

#include "dialoforge/errors.hpp"
#include "dialoforge/metrics.hpp"
#include "dialoforge/rng.hpp"
#include "dialoforge/text.hpp"
#include "fixtures.hpp"

using namespace dialoforge;
using dialoforge::testing::toy;

// 100 * (5/6 * 3/5 * 1/4 * 1/4)^(1/4), worked by hand: 5 unigram and 3
// bigram matches, one trigram, no 4-gram (add-one gives 1/4), equal lengths.
constexpr double kHandBleu = 42.044820762685724;

TEST_CASE("hand-computed toy pair") {
  CHECK(corpus_bleu({"the cat sat on the mat"}, {"the cat is on the mat"}) == doctest::Approx(kHandBleu).epsilon(1e-9));
}

TEST_CASE("identity and disjoint extremes") {
  const std::vector<std::string> s{"i have booked it .", "the reference is [train_reference] ."};
  CHECK(corpus_bleu(s, s) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(corpus_bleu({"alpha beta gamma delta"}, {"one two three four"}) < 1.0);
  CHECK(corpus_bleu({""}, {"x"}) == 0.0);
}

TEST_CASE("brevity penalty shrinks short candidates") {
  // Every n-gram of the candidate matches; only the penalty exp(1 - 6/4) remains.
  CHECK(corpus_bleu({"the cat sat on"}, {"the cat sat on the mat"}) ==
        doctest::Approx(100.0 * std::exp(1.0 - 6.0 / 4.0)).epsilon(1e-9));
}

TEST_CASE("corpus statistics are additive and order-free") {
  std::vector<std::string> c{"a b c d", "e f g", "a a b"}, r{"a b c e", "e f g h", "a b"};
  BleuStats sum = sentence_bleu_stats(tokenize(c[0]), tokenize(r[0]));
  sum += sentence_bleu_stats(tokenize(c[1]), tokenize(r[1]));
  sum += sentence_bleu_stats(tokenize(c[2]), tokenize(r[2]));
  CHECK(sum == corpus_bleu_stats_serial(c, r));
  std::swap(c[0], c[2]);
  std::swap(r[0], r[2]);
  CHECK(corpus_bleu(c, r) == doctest::Approx(bleu_from_stats(sum)));
  CHECK_THROWS_AS(corpus_bleu({"a"}, {}), LengthMismatch);
}

TEST_CASE("parallel statistics equal the serial reference") {
  std::vector<std::string> c, r;
  for (const Dialog &d : toy().corpus.dialogs) {
    for (const Turn &t : d.turns) {
      c.push_back(t.text);
      r.push_back(d.turns.front().text);
    }
  }
  for (int w : {1, 2, 4, 8}) CHECK(corpus_bleu_stats(c, r, w) == corpus_bleu_stats_serial(c, r));
}

TEST_CASE("combined score arithmetic") {
  CHECK(combined(7.12, 63.2, 34.4) == doctest::Approx(55.92).epsilon(1e-12));
  CHECK(combined(10.84, 78.2, 52.9) == doctest::Approx(76.39).epsilon(1e-12));
  CHECK(combined(0, 0, 0) == 0.0);
  CHECK(combined(1, 2, 3) < combined(1, 2, 4));
}

TEST_CASE("the scripted toy dialogs inform and succeed") {
  const Corpus &c = toy().corpus;
  const EvalReport r = evaluate(c, c, c.goals, toy().kb, 2);
  CHECK(r.bleu == doctest::Approx(100.0));
  CHECK(r.inform == doctest::Approx(100.0));
  CHECK(r.success == doctest::Approx(100.0));
  CHECK(r.combined == doctest::Approx(combined(r.bleu, r.inform, r.success)).epsilon(1e-12));
  CHECK(r.dialogs == c.dialogs.size());
  const std::string text = format_report(r, 9);
  CHECK(text.find("seed=9") != std::string::npos);
  CHECK(text.find("add-one") != std::string::npos);
}

TEST_CASE("success never exceeds inform") {
  const Corpus &c = toy().corpus;
  for (const Dialog &d : c.dialogs) {
    Dialog cut = d;
    // Dropping the last agent turn often loses the requested reference.
    auto it = std::find_if(cut.turns.rbegin(), cut.turns.rend(), [](const Turn &t) { return t.speaker == Speaker::Agent; });
    if (it != cut.turns.rend()) it->text = "okay .";
    for (const SegmentOutcome &o : inform_success(cut, c.goal_of(cut), toy().kb)) CHECK((o.inform || !o.success));
  }
}

TEST_CASE("unannotated agent turns cannot be scored") {
  Dialog d = toy().corpus.dialogs.front();
  for (Turn &t : d.turns) t.annotation.reset();
  CHECK_THROWS_AS(inform_success(d, toy().corpus.goal_of(d), toy().kb), MissingBelief);
}
