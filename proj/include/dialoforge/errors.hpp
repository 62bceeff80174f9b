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

#ifndef DIALOFORGE_ERRORS_HPP_
#define DIALOFORGE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace dialoforge {

// Base error. code() is the stable machine-readable name printed by the CLI.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string &message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string &code() const { return code_; }

 private:
  std::string code_;
};

#define DIALOFORGE_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string &message) : Error(#Name, message) {} \
  }

DIALOFORGE_DEFINE_ERROR(SchemaError);
DIALOFORGE_DEFINE_ERROR(UnknownDomain);
DIALOFORGE_DEFINE_ERROR(UnknownSlot);
DIALOFORGE_DEFINE_ERROR(UnresolvedPlaceholder);
DIALOFORGE_DEFINE_ERROR(DomainMismatch);
DIALOFORGE_DEFINE_ERROR(NoMatchingEntity);
DIALOFORGE_DEFINE_ERROR(EmptyCorpus);
DIALOFORGE_DEFINE_ERROR(InvalidDistribution);
DIALOFORGE_DEFINE_ERROR(BackendUnavailable);
DIALOFORGE_DEFINE_ERROR(DegenerateModel);
DIALOFORGE_DEFINE_ERROR(UnparseableBelief);
DIALOFORGE_DEFINE_ERROR(InsufficientCorpus);
DIALOFORGE_DEFINE_ERROR(EmptyPool);
DIALOFORGE_DEFINE_ERROR(InvalidDialog);
DIALOFORGE_DEFINE_ERROR(MissingTemplate);
DIALOFORGE_DEFINE_ERROR(ValueNotInVocabulary);
DIALOFORGE_DEFINE_ERROR(SameDomain);
DIALOFORGE_DEFINE_ERROR(Unterminated);
DIALOFORGE_DEFINE_ERROR(EmptyStratum);
DIALOFORGE_DEFINE_ERROR(RetryBudgetExhausted);
DIALOFORGE_DEFINE_ERROR(LengthMismatch);
DIALOFORGE_DEFINE_ERROR(MissingBelief);
DIALOFORGE_DEFINE_ERROR(InvalidArgument);

#undef DIALOFORGE_DEFINE_ERROR

// Belief-string syntax error; position is a token offset into the input.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string &expected)
      : Error("ParseError", "parse error at token " + std::to_string(position) +
                                ": expected " + expected),
        position_(position),
        expected_(expected) {}

  std::size_t position() const { return position_; }
  const std::string &expected() const { return expected_; }

 private:
  std::size_t position_;
  std::string expected_;
};

}  // namespace dialoforge

#endif  // DIALOFORGE_ERRORS_HPP_
