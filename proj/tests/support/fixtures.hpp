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

#ifndef DIALOFORGE_TESTS_FIXTURES_HPP_
#define DIALOFORGE_TESTS_FIXTURES_HPP_

#include <filesystem>
#include <string>

#include "dialoforge/models.hpp"
#include "dialoforge/toy_world.hpp"

namespace dialoforge::testing {

// Built once per process: the 140-dialog toy world and models trained on it.
const ToyWorld &toy();
const ModelSet &toy_models();

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string &tag);
  ~TempDir();
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace dialoforge::testing

#endif  // DIALOFORGE_TESTS_FIXTURES_HPP_
