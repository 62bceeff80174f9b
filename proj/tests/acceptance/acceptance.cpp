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

// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed below.
// Exit status is the number of failed criteria.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "backend_server.hpp"
#include "dialoforge/belief.hpp"
#include "dialoforge/errors.hpp"
#include "dialoforge/metrics.hpp"
#include "dialoforge/models.hpp"
#include "dialoforge/ngram.hpp"
#include "dialoforge/pipeline.hpp"
#include "dialoforge/remote.hpp"
#include "dialoforge/rng.hpp"
#include "dialoforge/selector.hpp"
#include "dialoforge/simulator.hpp"
#include "dialoforge/toy_world.hpp"

using namespace dialoforge;

namespace {

constexpr double kCombinedTolerance = 0.02;
constexpr double kCombinedBudgetSec = 1.0;
constexpr double kAugmentBudgetSec = 120.0;
constexpr double kSimulationBudgetSec = 300.0;
constexpr double kTerminationRate = 0.90;
constexpr int kMaxPairs = 12;
constexpr double kMassTolerance = 1e-9;
constexpr double kTripletLossCeiling = 1e-3;
constexpr double kTripletWinRate = 0.95;
constexpr double kBleuHandTolerance = 1e-6;
constexpr double kBleuHandOracle = 42.044820762685724;  // 100 * (5/6 * 3/5 * 1/4 * 1/4)^(1/4)
constexpr double kPerturbationRate = 0.80;

struct Outcome {
  bool passed = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char *f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Published rows: bleu, inform, success, printed combined.
struct Row {
  const char *label;
  double bleu, inform, success, combined;
};

constexpr std::array<Row, 12> kPublishedRows{{
    {"5% no-sim oracle", 7.12, 63.2, 34.4, 55.92},
    {"5% sim oracle", 9.22, 73.2, 42.6, 67.12},
    {"10% no-sim oracle", 9.66, 63.8, 38.9, 61.01},
    {"10% sim oracle", 10.84, 78.2, 52.9, 76.39},
    {"30% no-sim oracle", 10.45, 68.6, 41.2, 65.35},
    {"30% sim oracle", 12.45, 77.0, 52.3, 77.1},
    {"5% no-sim generated", 6.85, 19.3, 10.2, 21.6},
    {"5% sim generated", 9.86, 54.7, 31.9, 53.16},
    {"10% no-sim generated", 9.49, 52.3, 29.9, 50.59},
    {"10% sim generated", 10.73, 61.2, 40.6, 61.63},
    {"30% no-sim generated", 9.52, 50.9, 24.9, 47.42},
    {"30% sim generated", 12.38, 59.4, 38.3, 61.23},
}};

Outcome combined_arithmetic() {
  const auto t0 = Clock::now();
  int ok = 0;
  double worst = 0.0;
  std::string deviating;
  for (const Row &r : kPublishedRows) {
    const double err = std::abs(combined(r.bleu, r.inform, r.success) - r.combined);
    worst = std::max(worst, err);
    if (err <= kCombinedTolerance) {
      ++ok;
    } else {
      deviating += std::string(" [deviates: ") + r.label + "]";
    }
  }
  const double secs = seconds_since(t0);
  return {ok == static_cast<int>(kPublishedRows.size()) && secs < kCombinedBudgetSec,
          std::to_string(ok) + "/" + std::to_string(kPublishedRows.size()) + " rows within 0.02, max error " +
              fmt("%.2g", worst) + ", " + fmt("%.3f", secs) + " s" + deviating};
}

Outcome augmentation_composition() {
  const auto t0 = Clock::now();
  const ToyWorld world = make_toy_world(0, 20);
  const Corpus seeds = subsample(world.corpus, 0.5, 7);
  AugmentConfig cfg;
  cfg.seed = 7;
  const AugmentResult r = augment(seeds, world.kb, world.templates, cfg);
  std::size_t two_domain = 0;
  for (std::size_t i = r.seeds + r.singles; i < r.corpus.dialogs.size(); ++i) {
    const Goal &g = r.corpus.goal_of(r.corpus.dialogs[i]);
    two_domain += g.segments.size() == 2 && g.segments[0].domain != g.segments[1].domain;
  }
  const double secs = seconds_since(t0);
  const bool counts = world.corpus.dialogs.size() == 140 && r.seeds == 70 && r.singles == 70 && r.multis == 140 &&
                      r.corpus.dialogs.size() == 280;
  return {counts && two_domain == r.multis && secs < kAugmentBudgetSec,
          "seeds " + std::to_string(r.seeds) + " + single " + std::to_string(r.singles) + " + multi " +
              std::to_string(r.multis) + " = " + std::to_string(r.corpus.dialogs.size()) + ", two-domain " +
              std::to_string(two_domain) + "/" + std::to_string(r.multis) + ", " + fmt("%.2f", secs) + " s"};
}

Outcome simulation_validity() {
  const auto t0 = Clock::now();
  const ToyWorld world = make_toy_world(0, 20);
  const ModelSet models = ModelSet::train(world.corpus, world.kb, world.templates, {});
  std::vector<BatchRequest> requests;
  auto it = world.corpus.goals.begin();
  for (int i = 0; i < 200; ++i, ++it) {
    if (it == world.corpus.goals.end()) it = world.corpus.goals.begin();
    requests.push_back({"sim-" + std::to_string(i), it->second, derive_seed(2024, static_cast<std::uint64_t>(i))});
  }
  SimulationConfig cfg;
  cfg.max_turns = kMaxPairs;
  const auto outcomes =
      simulate_batch(models.user_bundle(), models.agent_bundle(), requests, world.kb, world.templates, cfg, 0);
  int valid = 0;
  std::size_t counts = 0, matching = 0;
  for (const SimulationOutcome &o : outcomes) {
    if (!o.ok()) continue;
    std::size_t pairs = 0;
    for (const Turn &t : o.dialog.turns) {
      pairs += t.speaker == Speaker::Agent;
      if (t.annotation) {
        ++counts;
        matching += static_cast<std::size_t>(t.annotation->kb_count) == query(world.kb, t.annotation->belief).size();
      }
    }
    const bool ends = o.dialog.terminated && !o.dialog.turns.empty() && o.dialog.turns.back().is_end_of_dialogue();
    valid += ends && pairs <= kMaxPairs && simulated_dialog_violations(o.dialog, world.kb).empty();
  }
  const double secs = seconds_since(t0);
  const double rate = valid / 200.0;
  return {rate >= kTerminationRate && counts > 0 && matching == counts && secs < kSimulationBudgetSec,
          std::to_string(valid) + "/200 terminated and valid (need >= 90%), kb_count re-query " +
              std::to_string(matching) + "/" + std::to_string(counts) + ", " + fmt("%.2f", secs) + " s"};
}

Outcome nucleus_oracle() {
  Rng rng(8675309);
  std::size_t draws = 0, outside = 0, size_mismatch = 0;
  double worst_mass = 0.0;
  for (int d = 0; d < 1000; ++d) {
    const std::size_t n = 2 + rng.below(60);
    std::vector<double> w(n);
    for (double &x : w) {
      // Mix of ties, zeros and spread-out weights.
      const double u = rng.uniform();
      x = u < 0.1 ? 0.0 : u < 0.3 ? 0.5 : -std::log(1.0 - rng.uniform());
    }
    if (std::accumulate(w.begin(), w.end(), 0.0) == 0.0) w[0] = 1.0;
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double &x : w) x /= total;
    const double drift = std::accumulate(w.begin(), w.end(), 0.0) - 1.0;
    w[0] = std::max(0.0, w[0] - drift);

    for (int step = 1; step <= 10; ++step) {
      const double p = step / 10.0;
      // Brute force: the fewest tokens whose largest masses reach p; every
      // token strictly above the cut-off value must be in, ties at it may be.
      std::vector<double> sorted = w;
      std::sort(sorted.rbegin(), sorted.rend());
      double mass = 0.0;
      std::size_t k = 0;
      while (k < n && mass < p - 1e-12) mass += sorted[k++];
      const double cutoff = sorted[k - 1];

      const Nucleus nucleus = compute_nucleus(w, p);
      size_mismatch += nucleus.indices.size() != k;
      const double renorm = std::accumulate(nucleus.probs.begin(), nucleus.probs.end(), 0.0);
      worst_mass = std::max(worst_mass, std::abs(renorm - 1.0));
      for (int s = 0; s < 20; ++s) {
        const std::size_t tok = sample_from_nucleus(nucleus, rng);
        ++draws;
        outside += !(w[tok] >= cutoff && w[tok] > 0.0);
      }
    }
  }
  return {outside == 0 && size_mismatch == 0 && worst_mass <= kMassTolerance,
          std::to_string(draws) + " draws over 1000 distributions x 10 p, outside nucleus " + std::to_string(outside) +
              ", size mismatches " + std::to_string(size_mismatch) + ", max |mass - 1| " + fmt("%.2g", worst_mass)};
}

Outcome triplet_training() {
  Rng rng(1729);
  // Separable by construction: a hidden direction puts every positive well
  // above its negatives; three negative kinds mimic the 5/2/3 partition.
  const Features hidden{1.5, -1.0, 0.8, 2.0, -1.2, 0.6};
  auto dot = [&](const Features &f) {
    double s = 0.0;
    for (std::size_t i = 0; i < kFeatureCount; ++i) s += hidden[i] * f[i];
    return s;
  };
  auto random_features = [&] {
    Features f{};
    for (double &x : f) x = rng.uniform() * 2.0 - 1.0;
    return f;
  };
  double norm2 = 0.0;
  for (double h : hidden) norm2 += h * h;
  // Moves f along the hidden direction until its projection equals `target`.
  auto project_to = [&](Features f, double target) {
    const double by = (target - dot(f)) / norm2;
    for (std::size_t i = 0; i < kFeatureCount; ++i) f[i] += by * hidden[i];
    return f;
  };
  std::vector<TripletGroup> groups;
  for (int g = 0; g < 400; ++g) {
    TripletGroup group;
    const double pos = rng.uniform() - 0.5;
    group.positive = project_to(random_features(), pos);
    const std::array<int, 3> partition{5, 2, 3};
    const std::array<double, 3> gap{2.0, 1.5, 1.75};
    for (std::size_t kind = 0; kind < 3; ++kind) {
      for (int i = 0; i < partition[kind]; ++i) {
        group.negatives.push_back(project_to(random_features(), pos - gap[kind] - rng.uniform()));
      }
    }
    groups.push_back(std::move(group));
  }
  FeatureScorer scorer;
  ScorerTrainConfig cfg;
  cfg.epochs = 3000;
  cfg.lr = 0.5;
  const TrainReport report = train_on_triplets(scorer, groups, cfg);
  const double loss = mean_triplet_loss(scorer, groups);
  const double wins = positive_wins_rate(scorer, groups);

  // Partition of sampled negatives over random corpora.
  int partition_ok = 0;
  const int trials = 500;
  for (int t = 0; t < trials; ++t) {
    std::vector<std::string> responses, context;
    const std::size_t nr = 2 + rng.below(30), nc = rng.below(8);
    for (std::size_t i = 0; i < nr; ++i) responses.push_back("response " + std::to_string(rng.below(40)));
    for (std::size_t i = 0; i < nc; ++i) context.push_back("context " + std::to_string(rng.below(10)));
    const std::string positive = "response " + std::to_string(rng.below(40));
    try {
      const NegativeSet n = sample_negatives(responses, context, positive, rng);
      const auto all = n.all();
      partition_ok += n.random.size() == 5 && n.context.size() == 2 && n.concatenated.size() == 3 &&
                      std::none_of(all.begin(), all.end(), [&](const std::string &s) { return s == positive; });
    } catch (const InsufficientCorpus &) {
      // Too few distinct responses; counts as a pass only when that is true.
      std::set<std::string> distinct(responses.begin(), responses.end());
      distinct.erase(positive);
      partition_ok += distinct.size() < 2;
    }
  }
  return {loss < kTripletLossCeiling && wins >= kTripletWinRate && partition_ok == trials,
          "mean loss " + fmt("%.3g", loss) + " (from " + fmt("%.3g", report.initial_loss()) + "), positive wins " +
              fmt("%.3f", wins) + ", 5/2/3 partition " + std::to_string(partition_ok) + "/" + std::to_string(trials)};
}

Outcome belief_round_trip() {
  Rng rng(4242);
  static const std::string alphabet = "abcdefghijklmnopqrstuvwxyz0123456789:'_-";
  auto word = [&] {
    std::string w;
    const std::size_t n = 1 + rng.below(9);
    for (std::size_t i = 0; i < n; ++i) w += alphabet[rng.below(alphabet.size())];
    return w;
  };
  int ok = 0;
  for (int i = 0; i < 10000; ++i) {
    BeliefState s(kAllDomains[rng.below(kAllDomains.size())]);
    const std::size_t pairs = rng.below(7);
    for (std::size_t p = 0; p < pairs; ++p) {
      std::string value = word();
      for (std::size_t e = rng.below(3); e > 0; --e) value += " " + word();
      s.set(word(), value);
    }
    ok += parse_belief(serialize_belief(s)) == s;
  }
  const BeliefState train =
      parse_belief("train ; destination = cambridge ; departure = ely ; day = saturday ; arrive_by = 11:45");
  const BeliefState expected(Domain::Train, {{"destination", "cambridge"},
                                              {"departure", "ely"},
                                              {"day", "saturday"},
                                              {"arrive_by", "11:45"}});
  const bool example = train == expected && train.size() == 4;
  return {ok == 10000 && example,
          std::to_string(ok) + "/10000 round-trips, train query " + (example ? "parses to 4 slots" : "MISPARSED")};
}

Outcome bleu_sanity() {
  const std::vector<std::string> refs{"i have booked you a table for [value_count] people .",
                                      "the reference number is [restaurant_reference] .", "is there anything else ?"};
  const double identity = corpus_bleu(refs, refs);
  const double disjoint = corpus_bleu({"alpha beta gamma delta epsilon", "zeta eta theta", "iota kappa"}, refs);
  const double hand = corpus_bleu({"the cat sat on the mat"}, {"the cat is on the mat"});
  return {std::abs(identity - 100.0) < 1e-9 && disjoint < 1.0 && std::abs(hand - kBleuHandOracle) <= kBleuHandTolerance,
          "identity " + fmt("%.6f", identity) + ", disjoint " + fmt("%.6f", disjoint) + ", hand case " +
              fmt("%.9f", hand) + " vs " + fmt("%.9f", kBleuHandOracle)};
}

Outcome perturbation_study() {
  const ToyWorld world = make_toy_world(0, 20);
  const ModelSet models = ModelSet::train(world.corpus, world.kb, world.templates, {});
  const GoalChanges changes = toy_perturbation();
  const Goal perturbed = perturb_goal(toy_restaurant_goal(), changes, world.kb);
  std::map<std::string, std::string> wanted = changes.set;
  wanted.insert(changes.add.begin(), changes.add.end());
  std::vector<BatchRequest> requests;
  for (int s = 0; s < 50; ++s) {
    requests.push_back({"perturbed-" + std::to_string(s), perturbed, derive_seed(4, static_cast<std::uint64_t>(s))});
  }
  const auto outcomes =
      simulate_batch(models.user_bundle(), models.agent_bundle(), requests, world.kb, world.templates, {}, 0);
  int voiced = 0, queried = 0, both = 0;
  for (const SimulationOutcome &o : outcomes) {
    if (!o.ok()) continue;
    bool in_user = true;
    for (const ValueGrounding &v : constraint_grounding(o.dialog, wanted)) in_user = in_user && v.in_user;
    const bool in_belief = belief_queries_all(o.dialog, wanted);
    voiced += in_user;
    queried += in_belief;
    both += in_user && in_belief;
  }
  return {both / 50.0 >= kPerturbationRate,
          std::to_string(both) + "/50 runs voice and query {pricerange=cheap, food=indian, area=north} (user " +
              std::to_string(voiced) + ", belief " + std::to_string(queried) + ")"};
}

Outcome protocol_conformance() {
  const ToyWorld world = make_toy_world(0, 20);
  const ModelSet models = ModelSet::train(world.corpus, world.kb, world.templates, {});
  dialoforge::testing::BackendServer server(models.backend, models.fallback_agent);
  RemoteConfig cfg;
  cfg.url = server.url();
  int passed = 0, total = 0;
  std::string failures;
  for (const ConformanceCheck &c : serve_check(cfg)) {
    ++total;
    passed += c.passed;
    if (!c.passed) failures += " [" + c.name + ": " + c.detail + "]";
  }
  return {passed == total && total > 0, std::to_string(passed) + "/" + std::to_string(total) + " checks" + failures};
}

}  // namespace

int main() {
  struct Criterion {
    const char *tier;
    const char *name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"PRIMARY", "combined_score_arithmetic", combined_arithmetic},
      {"PRIMARY", "augmentation_composition", augmentation_composition},
      {"PRIMARY", "end_to_end_simulation_validity", simulation_validity},
      {"PRIMARY", "nucleus_sampling_oracle", nucleus_oracle},
      {"PRIMARY", "triplet_training", triplet_training},
      {"PRIMARY", "belief_round_trip", belief_round_trip},
      {"PRIMARY", "bleu_sanity", bleu_sanity},
      {"PRIMARY", "perturbation_study", perturbation_study},
      {"SECONDARY", "protocol_conformance", protocol_conformance},
  };
  int failed = 0;
  for (const Criterion &c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.passed;
    std::cout << (o.passed ? "PASS" : "FAIL") << "  [" << c.tier << "] " << c.name << ": " << o.detail << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed;
}
