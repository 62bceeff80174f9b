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

// Reference model server for serve-check: wraps the n-gram backend and the
// mean agent scorer of a trained model (or of the toy world) in the HTTP
// protocol and serves until killed.
#include <chrono>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "backend_server.hpp"
#include "dialoforge/models.hpp"
#include "dialoforge/toy_world.hpp"

int main(int argc, char **argv) {
  CLI::App app{"dialoforge reference model server"};
  std::string model, host = "127.0.0.1";
  int port = 8765;
  app.add_option("--model", model, "Trained model directory (default: train on the toy world)");
  app.add_option("--host", host, "Bind address")->capture_default_str();
  app.add_option("--port", port, "Port (0 = ephemeral)")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    const dialoforge::ModelSet models = model.empty()
                                            ? [] {
                                                const auto world = dialoforge::make_toy_world();
                                                return dialoforge::ModelSet::train(world.corpus, world.kb,
                                                                                   world.templates, {});
                                              }()
                                            : dialoforge::ModelSet::load(model);
    dialoforge::testing::BackendServer server(models.backend, models.fallback_agent, host, port);
    std::cout << server.url() << std::endl;
    for (;;) std::this_thread::sleep_for(std::chrono::hours(1));
  } catch (const std::exception &e) {
    std::cerr << "{\"error\":\"ServerError\",\"message\":\"" << e.what() << "\"}\n";
    return 1;
  }
}
