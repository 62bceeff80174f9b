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

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "backend_server.hpp"
#include "fixtures.hpp"

namespace {

struct Run {
  int status = -1;
  std::string out;
};

// Runs the CLI with stderr folded into a file so both streams can be checked.
Run cli(const std::string &args, const std::string &err_file = "/dev/null") {
  const std::string cmd = std::string(DIALOFORGE_CLI) + " " + args + " 2>" + err_file;
  Run r;
  FILE *pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

const std::string kWorld = std::string(" --kb ") + DIALOFORGE_DATA + "/kb --templates " + DIALOFORGE_DATA + "/goals";

}  // namespace

TEST_CASE("simulate is byte-identical across runs and worker counts") {
  const Run a = cli("simulate --goal g1 --seed 3" + kWorld);
  const Run b = cli("simulate --goal g1 --seed 3 --workers 4" + kWorld);
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("# dialoforge simulate seed=3", 0) == 0);
  CHECK(a.out.find("<eod>") != std::string::npos);
}

TEST_CASE("every command echoes its seed") {
  dialoforge::testing::TempDir dir("cli");
  const std::string d = dir.path().string();
  CHECK(cli("toy-data --out " + d + "/toy --per-domain 4 --seed 2").out.rfind("# dialoforge toy-data seed=2", 0) == 0);
  const Run train = cli("train --seed 5 --out " + d + "/model" + kWorld);
  REQUIRE(train.status == 0);
  CHECK(train.out.rfind("# dialoforge train seed=5", 0) == 0);
  const Run sim = cli("simulate --model " + d + "/model --goal g4 --count 3 --seed 6 --out " + d + "/sim.jsonl" + kWorld);
  REQUIRE(sim.status == 0);
  CHECK(slurp(d + "/sim.jsonl") == sim.out);
  const Run pert = cli("perturb --goal g4 --set pricerange=cheap --set food=indian --add area=north --seed 8" + kWorld);
  REQUIRE(pert.status == 0);
  CHECK(pert.out.rfind("# dialoforge perturb seed=8", 0) == 0);
  CHECK(pert.out.find("\"area\":\"north\"") != std::string::npos);
}

TEST_CASE("augment writes the 4N corpus") {
  dialoforge::testing::TempDir dir("aug");
  const Run r = cli("augment --seed-fraction 0.10" + kWorld + " --out " + dir.path().string() + " --seed 7");
  REQUIRE(r.status == 0);
  CHECK(r.out.rfind("# dialoforge augment seed=7", 0) == 0);
  CHECK(r.out.find("total\t56") != std::string::npos);
  CHECK(std::filesystem::exists(dir.path() / "turns.tsv"));
}

TEST_CASE("replay then evaluate produces a report") {
  dialoforge::testing::TempDir dir("eval");
  const std::string gen = (dir.path() / "gen.jsonl").string();
  const std::string data = DIALOFORGE_DATA;
  REQUIRE(cli("simulate --replay " + data + "/corpus.jsonl --seed 1 --out " + gen + kWorld).status == 0);
  const Run r = cli("evaluate --generated " + gen + " --reference " + data + "/corpus.jsonl --goals " + data +
                    "/goals/goals.json --kb " + data + "/kb --seed 1 --report " + (dir.path() / "r.txt").string());
  REQUIRE(r.status == 0);
  CHECK(r.out.find("seed=1") != std::string::npos);
  CHECK(r.out.find("BLEU\tInform\tSuccess\tCombined") != std::string::npos);
  CHECK(slurp(dir.path() / "r.txt") == r.out);
}

TEST_CASE("a config file overrides flags") {
  dialoforge::testing::TempDir dir("cfg");
  {
    std::ofstream out(dir.path() / "c.json");
    out << R"({"seed": 3, "goal": ["g1"]})";
  }
  const Run a = cli("simulate --goal g4 --seed 99 --config " + (dir.path() / "c.json").string() + kWorld);
  const Run b = cli("simulate --goal g1 --seed 3" + kWorld);
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("errors exit non-zero with a json summary on stderr") {
  dialoforge::testing::TempDir dir("err");
  const std::string err = (dir.path() / "err.txt").string();
  auto summary = [&] { return nlohmann::json::parse(slurp(err)); };

  CHECK(cli("simulate --goal nope" + kWorld, err).status == 2);
  CHECK(summary().at("error") == "InvalidArgument");
  CHECK(cli("frobnicate", err).status == 2);
  CHECK(summary().at("error") == "UsageError");
  CHECK(cli("simulate --kb /nonexistent --templates /nonexistent", err).status == 1);
  CHECK(summary().at("error") == "SchemaError");
  CHECK(cli("augment --seed-fraction 0.01" + kWorld + " --out " + dir.path().string(), err).status == 1);
  CHECK(summary().at("error") == "EmptyStratum");
  CHECK(cli("serve-check --backend-url http://127.0.0.1:9 --backend-timeout-ms 200", err).status == 4);
}

TEST_CASE("serve-check passes against the reference server") {
  const auto &m = dialoforge::testing::toy_models();
  dialoforge::testing::BackendServer server(m.backend, m.fallback_agent);
  const Run r = cli("serve-check --backend-url " + server.url() + " --seed 1");
  CHECK(r.status == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("PASS\tgenerate_pool_size") != std::string::npos);
}

TEST_CASE("the backend url can come from the environment") {
  const auto &m = dialoforge::testing::toy_models();
  dialoforge::testing::BackendServer server(m.backend, m.fallback_agent);
  const Run remote = cli("simulate --goal g1 --seed 3" + kWorld + " --backend-url " + server.url());
  ::setenv("DIALOFORGE_BACKEND_URL", server.url().c_str(), 1);
  const Run env = cli("simulate --goal g1 --seed 3" + kWorld);
  ::unsetenv("DIALOFORGE_BACKEND_URL");
  const Run local = cli("simulate --goal g1 --seed 3" + kWorld);
  REQUIRE(remote.status == 0);
  CHECK(remote.out == local.out);
  CHECK(env.out == local.out);
}
