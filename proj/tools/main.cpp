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

// dialoforge command line: train, simulate, augment, evaluate, perturb,
// serve-check and toy-data.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dialoforge/corpus.hpp"
#include "dialoforge/errors.hpp"
#include "dialoforge/goals.hpp"
#include "dialoforge/kb.hpp"
#include "dialoforge/metrics.hpp"
#include "dialoforge/models.hpp"
#include "dialoforge/pipeline.hpp"
#include "dialoforge/remote.hpp"
#include "dialoforge/rng.hpp"
#include "dialoforge/simulator.hpp"
#include "dialoforge/toy_world.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dialoforge;

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,       // a library error
  kUsage = 2,         // bad flags or config
  kUnavailable = 3,   // backend unreachable
  kCheckFailed = 4,   // serve-check or simulation reported failures
  kInternal = 70,
};

struct GlobalOptions {
  int workers = 0;
  std::string config;
  bool trace = false;
  std::string backend_url;
  int backend_timeout_ms = 0;
};

// Paths shared by the commands that need the world.
struct WorldOptions {
  std::string kb = "kb";
  std::string templates = "goals";
  std::string corpus;  // default: corpus.jsonl next to the templates directory
  std::string goals;   // default: goals.json inside the templates directory
};

struct ModelOptions {
  std::string model;  // trained model directory; trains from the corpus when empty
  int order = 4;
  int epochs = 200;
};

struct SamplingOptions {
  int max_turns = 12;
  int pool_size = 5;
  double nucleus_p = 0.9;
  int max_tokens = 60;
  bool sample = false;
};

fs::path templates_dir(const WorldOptions &w) {
  fs::path t = fs::path(w.templates).lexically_normal();
  if (t.filename().empty()) t = t.parent_path();
  return fs::is_directory(t) ? t : t.parent_path();
}

fs::path corpus_path(const WorldOptions &w) {
  if (!w.corpus.empty()) return w.corpus;
  fs::path dir = fs::absolute(templates_dir(w)).lexically_normal();
  return dir.parent_path() / "corpus.jsonl";
}

fs::path goals_path(const WorldOptions &w) {
  return w.goals.empty() ? templates_dir(w) / "goals.json" : fs::path(w.goals);
}

std::string header(const std::string &command, std::uint64_t seed) {
  return "# dialoforge " + command + " seed=" + std::to_string(seed);
}

std::optional<RemoteConfig> remote_config(const GlobalOptions &g) {
  return RemoteConfig::resolve(g.backend_url.empty() ? std::nullopt : std::optional<std::string>(g.backend_url),
                               g.backend_timeout_ms > 0 ? std::optional<int>(g.backend_timeout_ms) : std::nullopt);
}

SimulationConfig simulation_config(const SamplingOptions &s, std::uint64_t seed, bool trace) {
  SimulationConfig cfg;
  cfg.max_turns = s.max_turns;
  cfg.sampling.pool_size = s.pool_size;
  cfg.sampling.nucleus_p = s.nucleus_p;
  cfg.sampling.max_tokens = s.max_tokens;
  cfg.selection = s.sample ? SelectionMode::Sample : SelectionMode::Argmax;
  cfg.seed = seed;
  cfg.trace = trace;
  cfg.validate();
  return cfg;
}

ModelTrainConfig train_config(const ModelOptions &m, std::uint64_t seed, int workers) {
  ModelTrainConfig cfg;
  cfg.workers = workers;
  cfg.ngram.order = m.order;
  cfg.scorer.epochs = m.epochs;
  cfg.seed = seed;
  return cfg;
}

ModelSet obtain_models(const ModelOptions &m, const WorldOptions &w, const KnowledgeBase &kb,
                       const GoalTemplates &templates, std::uint64_t seed, int workers) {
  if (!m.model.empty()) return ModelSet::load(m.model);
  const Corpus corpus = load_corpus(corpus_path(w), goals_path(w));
  return ModelSet::train(corpus, kb, templates, train_config(m, seed, workers));
}

void write_text(const std::string &path, const std::string &text) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw SchemaError("cannot write " + path);
  out << text;
}

void emit_trace(const std::string &dialog_id, const std::vector<TurnTrace> &trace) {
  for (std::size_t i = 0; i < trace.size(); ++i) {
    json j = trace[i].to_json();
    j["dialog_id"] = dialog_id;
    j["turn"] = i;
    std::cerr << j.dump() << "\n";
  }
}

// Values the perturbation touched, for the grounding summary.
std::map<std::string, std::string> changed_values(const GoalChanges &changes) {
  std::map<std::string, std::string> out = changes.set;
  out.insert(changes.add.begin(), changes.add.end());
  return out;
}

GoalChanges parse_changes(const std::vector<std::string> &set, const std::vector<std::string> &add) {
  GoalChanges changes;
  for (const std::string &s : set) changes.set.insert(parse_assignment(s));
  for (const std::string &s : add) changes.add.insert(parse_assignment(s));
  if (changes.empty()) throw InvalidArgument("perturb needs at least one --set or --add");
  return changes;
}

// Applies a JSON config file on top of the parsed flags: every key names a
// long option of the selected command (or a global one) and replaces
// whatever the command line said.
void apply_config(CLI::App &app, CLI::App &command, const std::string &path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file " + path);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::exception &e) {
    throw InvalidArgument("config file " + path + ": " + e.what());
  }
  if (!cfg.is_object()) throw InvalidArgument("config file " + path + " must hold a JSON object");
  for (const auto &[key, value] : cfg.items()) {
    if (key == "config") continue;
    CLI::Option *opt = command.get_option_no_throw("--" + key);
    if (opt == nullptr) opt = app.get_option_no_throw("--" + key);
    if (opt == nullptr) throw InvalidArgument("config file " + path + ": unknown option '" + key + "'");
    auto as_text = [&](const json &v) {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
      if (v.is_number()) return v.dump();
      throw InvalidArgument("config file " + path + ": option '" + key + "' needs a scalar value");
    };
    opt->clear();
    if (value.is_array()) {
      for (const json &v : value) opt->add_result(as_text(v));
    } else {
      opt->add_result(as_text(value));
    }
    opt->run_callback();
  }
}

int report_error(const std::string &code, const std::string &message, int exit_code) {
  std::cerr << json{{"error", code}, {"message", message}, {"exit_code", exit_code}}.dump() << "\n";
  return exit_code;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"dialoforge: goal-conditioned two-bot dialog simulation"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--workers", g.workers, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  app.add_option("--config", g.config, "JSON file whose keys override command-line flags");
  app.add_flag("--trace", g.trace, "Log candidate pools, scores, beliefs and KB results to stderr");
  app.add_option("--backend-url", g.backend_url, std::string("Remote generation backend (else $") + kBackendUrlEnv + ")");
  app.add_option("--backend-timeout-ms", g.backend_timeout_ms,
                 std::string("Remote request timeout (else $") + kBackendTimeoutEnv + ")");

  WorldOptions w;
  ModelOptions m;
  SamplingOptions s;
  std::uint64_t seed = 0;
  auto add_world = [&](CLI::App *c, bool with_corpus) {
    c->add_option("--kb", w.kb, "KB directory (kb.json, slots.json)")->capture_default_str();
    c->add_option("--templates", w.templates, "Goal template directory or templates.json")->capture_default_str();
    c->add_option("--goals", w.goals, "Goal file (default: goals.json in the templates directory)");
    if (with_corpus) c->add_option("--corpus", w.corpus, "Corpus JSONL (default: corpus.jsonl beside the templates)");
  };
  auto add_models = [&](CLI::App *c) {
    c->add_option("--model", m.model, "Trained model directory (default: train from the corpus)");
    c->add_option("--order", m.order, "n-gram order when training")->capture_default_str();
    c->add_option("--epochs", m.epochs, "Scorer epochs when training")->capture_default_str();
  };
  auto add_sampling = [&](CLI::App *c) {
    c->add_option("--max-turns", s.max_turns, "User/agent pairs per dialog")->capture_default_str();
    c->add_option("--pool-size", s.pool_size, "Candidates per turn")->capture_default_str();
    c->add_option("--nucleus-p", s.nucleus_p, "Nucleus mass")->capture_default_str();
    c->add_option("--max-tokens", s.max_tokens, "Tokens per candidate")->capture_default_str();
    c->add_flag("--sample", s.sample, "Sample from the softmax over scores instead of argmax");
  };
  auto add_seed = [&](CLI::App *c) { c->add_option("--seed", seed, "Master seed")->capture_default_str(); };

  // toy-data
  CLI::App *toy = app.add_subcommand("toy-data", "Write the built-in toy world (KB, goals, corpus)");
  std::string toy_out;
  int per_domain = 20;
  toy->add_option("--out", toy_out, "Output directory")->required();
  toy->add_option("--per-domain", per_domain, "Dialogs per domain")->capture_default_str();
  add_seed(toy);

  // train
  CLI::App *train = app.add_subcommand("train", "Fit the n-gram backend and the response scorers");
  std::string train_out;
  add_world(train, true);
  train->add_option("--out", train_out, "Model directory")->required();
  train->add_option("--order", m.order, "n-gram order")->capture_default_str();
  train->add_option("--epochs", m.epochs, "Scorer epochs")->capture_default_str();
  add_seed(train);

  // simulate
  CLI::App *sim = app.add_subcommand("simulate", "Let the user and agent bots converse");
  std::vector<std::string> goal_ids;
  int count = 1;
  std::string sim_out, replay;
  add_world(sim, true);
  add_models(sim);
  add_sampling(sim);
  add_seed(sim);
  sim->add_option("--goal", goal_ids, "Goal id (repeatable; default all goals)");
  sim->add_option("--count", count, "Dialogs per goal")->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--out", sim_out, "Write the dialogs here as well as to stdout");
  sim->add_option("--replay", replay, "Regenerate the agent turns of this reference corpus instead");

  // augment
  CLI::App *aug = app.add_subcommand("augment", "Grow a seed subsample into a synthetic corpus");
  double fraction = 0.0;
  std::string aug_out, style = "lexicalized";
  int retry_budget = 3;
  bool strict = false;
  add_world(aug, true);
  add_sampling(aug);
  add_seed(aug);
  aug->add_option("--seed-fraction", fraction, "Fraction of single-goal dialogs kept as seeds")->required();
  aug->add_option("--out", aug_out, "Output directory")->required();
  aug->add_option("--retry-budget", retry_budget, "Re-simulations per failed dialog")->capture_default_str();
  aug->add_flag("--strict", strict, "Fail instead of coming up short");
  aug->add_option("--style", style, "Export style")->check(CLI::IsMember({"lexicalized", "delexicalized"}))
      ->capture_default_str();
  aug->add_option("--order", m.order, "n-gram order")->capture_default_str();
  aug->add_option("--epochs", m.epochs, "Scorer epochs")->capture_default_str();

  // evaluate
  CLI::App *eval = app.add_subcommand("evaluate", "BLEU, Inform, Success and Combined");
  std::string generated, reference, report_path;
  eval->add_option("--generated", generated, "Generated corpus JSONL")->required();
  eval->add_option("--reference", reference, "Reference corpus JSONL")->required();
  eval->add_option("--goals", w.goals, "Goal file")->required();
  eval->add_option("--kb", w.kb, "KB directory")->capture_default_str();
  eval->add_option("--report", report_path, "Write the report here as well as to stdout");
  add_seed(eval);

  // perturb
  CLI::App *pert = app.add_subcommand("perturb", "Edit a goal and optionally re-simulate it");
  std::string pert_goal;
  std::vector<std::string> sets, adds;
  bool resimulate = false;
  int runs = 1;
  add_world(pert, true);
  add_models(pert);
  add_sampling(pert);
  add_seed(pert);
  pert->add_option("--goal", pert_goal, "Goal id")->required();
  pert->add_option("--set", sets, "slot=value replacing an existing value (repeatable)");
  pert->add_option("--add", adds, "slot=value adding a constraint (repeatable)");
  pert->add_flag("--simulate", resimulate, "Simulate the perturbed goal");
  pert->add_option("--runs", runs, "Seeded simulations")->check(CLI::PositiveNumber)->capture_default_str();

  // serve-check
  CLI::App *check = app.add_subcommand("serve-check", "Protocol conformance suite against a running server");
  add_seed(check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    return report_error("UsageError", e.what(), kUsage);
  }

  CLI::App *command = app.get_subcommands().front();
  try {
    if (!g.config.empty()) apply_config(app, *command, g.config);
  } catch (const Error &e) {
    return report_error("UsageError", e.what(), kUsage);
  } catch (const CLI::Error &e) {
    return report_error("UsageError", e.what(), kUsage);
  }

  try {
    if (command == toy) {
      ToyWorld world = make_toy_world(seed, per_domain);
      write_toy_world(world, toy_out);
      std::cout << header("toy-data", seed) << "\n"
                << "dialogs\t" << world.corpus.dialogs.size() << "\ngoals\t" << world.corpus.goals.size()
                << "\nout\t" << toy_out << "\n";
      return kOk;
    }

    if (command == train) {
      const KnowledgeBase kb = load_kb(w.kb);
      const GoalTemplates templates = load_templates(w.templates);
      const Corpus corpus = load_corpus(corpus_path(w), goals_path(w));
      const ModelSet models = ModelSet::train(corpus, kb, templates, train_config(m, seed, g.workers));
      models.save(train_out);
      std::cout << header("train", seed) << "\n"
                << "dialogs\t" << corpus.dialogs.size() << "\nuser_scorers\t" << models.user_scorers.size()
                << "\nagent_scorers\t" << models.agent_scorers.size() << "\nout\t" << train_out << "\n";
      return kOk;
    }

    if (command == sim) {
      const KnowledgeBase kb = load_kb(w.kb);
      const GoalTemplates templates = load_templates(w.templates);
      const auto goals = load_goals(goals_path(w));
      const ModelSet models = obtain_models(m, w, kb, templates, seed, g.workers);
      std::unique_ptr<RemoteBackend> remote;
      if (auto rc = remote_config(g)) remote = std::make_unique<RemoteBackend>(*rc);
      const BotBundle user = models.user_bundle(remote.get());
      const BotBundle agent = models.agent_bundle(remote.get());
      const SimulationConfig cfg = simulation_config(s, seed, g.trace);

      std::vector<SimulationOutcome> outcomes;
      if (!replay.empty()) {
        const Corpus ref = load_corpus(replay);
        outcomes = replay_batch(agent, ref.dialogs, goals, kb, cfg, g.workers);
      } else {
        std::vector<BatchRequest> requests;
        if (goal_ids.empty()) {
          for (const auto &[id, goal] : goals) goal_ids.push_back(id);
        }
        for (const std::string &id : goal_ids) {
          auto it = goals.find(id);
          if (it == goals.end()) throw InvalidArgument("unknown goal '" + id + "'");
          for (int c = 0; c < count; ++c) {
            const std::uint64_t dseed = count == 1 ? seed : derive_seed(seed, static_cast<std::uint64_t>(c));
            requests.push_back({id + "-s" + std::to_string(seed) + "-" + std::to_string(c), it->second, dseed});
          }
        }
        if (g.trace) {
          // Traced runs go one at a time so the log reads in order.
          for (const BatchRequest &r : requests) {
            SimulationConfig rc = cfg;
            rc.seed = r.seed;
            std::vector<TurnTrace> trace;
            SimulationOutcome o;
            try {
              o.dialog = simulate_dialog(user, agent, r.goal, kb, templates, rc, r.dialog_id, &trace);
            } catch (const Error &e) {
              o.dialog.dialog_id = r.dialog_id;
              o.error = e.code() + ": " + e.what();
            }
            emit_trace(r.dialog_id, trace);
            outcomes.push_back(std::move(o));
          }
        } else {
          outcomes = simulate_batch(user, agent, requests, kb, templates, cfg, g.workers);
        }
      }
      std::ostringstream out;
      out << header("simulate", seed) << " dialogs=" << outcomes.size() << "\n";
      std::size_t failed = 0;
      for (const SimulationOutcome &o : outcomes) {
        if (o.ok()) {
          out << dialog_to_json_line(o.dialog) << "\n";
        } else {
          ++failed;
          out << "# failed " << o.dialog.dialog_id << ": " << *o.error << "\n";
        }
      }
      std::cout << out.str();
      if (!sim_out.empty()) write_text(sim_out, out.str());
      if (failed > 0) {
        return report_error("SimulationFailed", std::to_string(failed) + " of " + std::to_string(outcomes.size()) +
                                                    " dialogs failed",
                            kCheckFailed);
      }
      return kOk;
    }

    if (command == aug) {
      const KnowledgeBase kb = load_kb(w.kb);
      const GoalTemplates templates = load_templates(w.templates);
      const Corpus corpus = load_corpus(corpus_path(w), goals_path(w));
      const Corpus seeds = subsample(corpus, fraction, seed);
      AugmentConfig cfg;
      cfg.retry_budget = retry_budget;
      cfg.strict = strict;
      cfg.workers = g.workers;
      cfg.seed = seed;
      cfg.train = train_config(m, seed, g.workers);
      cfg.simulation = simulation_config(s, seed, false);
      std::unique_ptr<RemoteBackend> remote;
      if (auto rc = remote_config(g)) remote = std::make_unique<RemoteBackend>(*rc);
      const AugmentResult result = augment(seeds, kb, templates, cfg, remote.get());
      export_training_set(result.corpus, kb, style == "lexicalized" ? ExportStyle::Lexicalized : ExportStyle::Delexicalized,
                          aug_out);
      std::cout << header("augment", seed) << " seed_fraction=" << fraction << "\n"
                << "seeds\t" << result.seeds << "\nsingle_goal\t" << result.singles << "\nmulti_goal\t"
                << result.multis << "\ntotal\t" << result.corpus.dialogs.size() << "\nshortfall\t"
                << result.shortfall << "\nout\t" << aug_out << "\n";
      for (const std::string &warning : result.warnings) std::cout << "# warning: " << warning << "\n";
      return kOk;
    }

    if (command == eval) {
      const KnowledgeBase kb = load_kb(w.kb);
      const auto goals = load_goals(w.goals);
      const Corpus gen = load_corpus(generated);
      const Corpus ref = load_corpus(reference);
      const EvalReport report = evaluate(gen, ref, goals, kb, g.workers);
      const std::string text = format_report(report, seed);
      std::cout << text;
      if (!report_path.empty()) write_text(report_path, text);
      return kOk;
    }

    if (command == pert) {
      const KnowledgeBase kb = load_kb(w.kb);
      const GoalTemplates templates = load_templates(w.templates);
      const auto goals = load_goals(goals_path(w));
      auto it = goals.find(pert_goal);
      if (it == goals.end()) throw InvalidArgument("unknown goal '" + pert_goal + "'");
      const GoalChanges changes = parse_changes(sets, adds);
      const Goal perturbed = perturb_goal(it->second, changes, kb);
      std::cout << header("perturb", seed) << "\n"
                << "original\t" << goal_to_json_line(it->second) << "\n"
                << "perturbed\t" << goal_to_json_line(perturbed) << "\n"
                << "instruction\t" << render_goal(perturbed, templates) << "\n";
      if (!resimulate) return kOk;

      const ModelSet models = obtain_models(m, w, kb, templates, seed, g.workers);
      std::unique_ptr<RemoteBackend> remote;
      if (auto rc = remote_config(g)) remote = std::make_unique<RemoteBackend>(*rc);
      const BotBundle user = models.user_bundle(remote.get());
      const BotBundle agent = models.agent_bundle(remote.get());
      const SimulationConfig cfg = simulation_config(s, seed, false);
      std::vector<BatchRequest> requests;
      for (int r = 0; r < runs; ++r) {
        requests.push_back({pert_goal + "-perturbed-" + std::to_string(r), perturbed,
                            derive_seed(seed, static_cast<std::uint64_t>(r))});
      }
      const auto outcomes = simulate_batch(user, agent, requests, kb, templates, cfg, g.workers);
      const auto wanted = changed_values(changes);
      int voiced = 0, queried = 0, both = 0;
      for (const SimulationOutcome &o : outcomes) {
        if (!o.ok()) {
          std::cout << "# failed " << o.dialog.dialog_id << ": " << *o.error << "\n";
          continue;
        }
        std::cout << dialog_to_json_line(o.dialog) << "\n";
        bool in_user = true;
        for (const ValueGrounding &v : constraint_grounding(o.dialog, wanted)) in_user = in_user && v.in_user;
        const bool in_belief = belief_queries_all(o.dialog, wanted);
        voiced += in_user;
        queried += in_belief;
        both += in_user && in_belief;
      }
      std::cout << "runs\t" << runs << "\nuser_mentions_new_values\t" << voiced << "\nbelief_queries_new_values\t"
                << queried << "\nboth\t" << both << "\n";
      return kOk;
    }

    if (command == check) {
      auto rc = remote_config(g);
      if (!rc) throw InvalidArgument(std::string("serve-check needs --backend-url or $") + kBackendUrlEnv);
      const auto results = serve_check(*rc);
      std::cout << header("serve-check", seed) << " url=" << rc->url << "\n";
      int failed = 0;
      for (const ConformanceCheck &c : results) {
        std::cout << (c.passed ? "PASS" : "FAIL") << "\t" << c.name;
        if (!c.detail.empty()) std::cout << "\t" << c.detail;
        std::cout << "\n";
        failed += !c.passed;
      }
      if (failed > 0) {
        return report_error("ConformanceFailure", std::to_string(failed) + " checks failed", kCheckFailed);
      }
      return kOk;
    }
  } catch (const BackendUnavailable &e) {
    return report_error(e.code(), e.what(), kUnavailable);
  } catch (const InvalidArgument &e) {
    return report_error(e.code(), e.what(), kUsage);
  } catch (const Error &e) {
    return report_error(e.code(), e.what(), kFailure);
  } catch (const std::exception &e) {
    return report_error("InternalError", e.what(), kInternal);
  }
  return kInternal;
}
