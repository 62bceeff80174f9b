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

#ifndef DIALOFORGE_TESTS_BACKEND_SERVER_HPP_
#define DIALOFORGE_TESTS_BACKEND_SERVER_HPP_

#include <memory>
#include <string>
#include <thread>

#include "dialoforge/generation.hpp"
#include "dialoforge/selector.hpp"

namespace httplib {
class Server;
}

namespace dialoforge::testing {

// Serves /generate, /belief and /score over HTTP from an in-process backend
// and scorer. Port 0 picks an ephemeral port. Both must outlive the server.
class BackendServer {
 public:
  BackendServer(const GenerationBackend &backend, const Scorer &scorer, const std::string &host = "127.0.0.1",
                int port = 0);
  ~BackendServer();
  BackendServer(const BackendServer &) = delete;
  BackendServer &operator=(const BackendServer &) = delete;

  int port() const { return port_; }
  std::string url() const { return "http://" + host_ + ":" + std::to_string(port_); }

 private:
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_;
  int port_ = 0;
};

}  // namespace dialoforge::testing

#endif  // DIALOFORGE_TESTS_BACKEND_SERVER_HPP_
