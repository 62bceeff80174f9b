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

// Parallel kernels against their serial references: batch simulation, corpus
// BLEU statistics and per-domain scorer training. Prints one row per kernel
// and checks that both paths agree.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include <omp.h>

#include "dialoforge/metrics.hpp"
#include "dialoforge/models.hpp"
#include "dialoforge/rng.hpp"
#include "dialoforge/simulator.hpp"
#include "dialoforge/toy_world.hpp"

using namespace dialoforge;

namespace {

// Best of `reps` wall-clock runs, in milliseconds.
double time_ms(int reps, const std::function<void()> &f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const char *kernel, std::size_t items, double serial, double parallel, bool same) {
  std::printf("%-22s %8zu %12.2f %12.2f %8.2fx %s\n", kernel, items, serial, parallel, serial / parallel,
              same ? "match" : "MISMATCH");
}

}  // namespace

int main(int argc, char **argv) {
  const int dialogs = argc > 1 ? std::atoi(argv[1]) : 400;
  const int workers = argc > 2 ? std::atoi(argv[2]) : omp_get_max_threads();
  const int reps = 3;
  const ToyWorld world = make_toy_world(0, 20);
  const ModelSet models = ModelSet::train(world.corpus, world.kb, world.templates, {});
  const BotBundle user = models.user_bundle();
  const BotBundle agent = models.agent_bundle();

  std::printf("# dialoforge bench seed=0 workers=%d dialogs=%d\n", workers, dialogs);
  std::printf("%-22s %8s %12s %12s %9s %s\n", "kernel", "items", "serial_ms", "parallel_ms", "speedup", "check");
  bool all_same = true;

  std::vector<BatchRequest> requests;
  auto it = world.corpus.goals.begin();
  for (int i = 0; i < dialogs; ++i, ++it) {
    if (it == world.corpus.goals.end()) it = world.corpus.goals.begin();
    requests.push_back({"b" + std::to_string(i), it->second, derive_seed(1, static_cast<std::uint64_t>(i))});
  }
  std::vector<SimulationOutcome> ser, par;
  const double sim_serial = time_ms(reps, [&] { ser = simulate_batch_serial(user, agent, requests, world.kb, world.templates, {}); });
  const double sim_parallel = time_ms(reps, [&] { par = simulate_batch(user, agent, requests, world.kb, world.templates, {}, workers); });
  bool same = ser.size() == par.size();
  for (std::size_t i = 0; same && i < ser.size(); ++i) same = ser[i].dialog == par[i].dialog;
  row("simulate_batch", requests.size(), sim_serial, sim_parallel, same);
  all_same = all_same && same;

  std::vector<std::string> cands, refs;
  for (const SimulationOutcome &o : ser) {
    std::size_t k = 0;
    for (const Turn &t : o.dialog.turns) {
      if (t.speaker != Speaker::Agent) continue;
      cands.push_back(t.text);
      const Dialog &ref = world.corpus.dialogs[k++ % world.corpus.dialogs.size()];
      refs.push_back(ref.turns[1].text);
    }
  }
  for (int copy = 0; copy < 5; ++copy) {
    cands.insert(cands.end(), cands.begin(), cands.end());
    refs.insert(refs.end(), refs.begin(), refs.end());
  }
  BleuStats bs, bp;
  const double bleu_serial = time_ms(reps, [&] { bs = corpus_bleu_stats_serial(cands, refs); });
  const double bleu_parallel = time_ms(reps, [&] { bp = corpus_bleu_stats(cands, refs, workers); });
  row("corpus_bleu_stats", cands.size(), bleu_serial, bleu_parallel, bs == bp);
  all_same = all_same && bs == bp;

  ModelTrainConfig serial_cfg, parallel_cfg;
  serial_cfg.workers = 1;
  parallel_cfg.workers = workers;
  ModelSet ms, mp;
  const double train_serial = time_ms(1, [&] { ms = ModelSet::train(world.corpus, world.kb, world.templates, serial_cfg); });
  const double train_parallel = time_ms(1, [&] { mp = ModelSet::train(world.corpus, world.kb, world.templates, parallel_cfg); });
  same = ms.user_scorers == mp.user_scorers && ms.agent_scorers == mp.agent_scorers;
  row("scorer_training", ms.user_scorers.size() + ms.agent_scorers.size(), train_serial, train_parallel, same);
  all_same = all_same && same;

  return all_same ? 0 : 1;
}
