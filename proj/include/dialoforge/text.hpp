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

#ifndef DIALOFORGE_TEXT_HPP_
#define DIALOFORGE_TEXT_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dialoforge {

// The literal end-of-dialogue token emitted by the user side.
inline constexpr std::string_view kEndOfDialogue = "<eod>";

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

// Whitespace + punctuation tokenizer. Output is lower-cased. Placeholders
// ("[hotel_name]"), clock times ("11:45"), decimals ("28.16") and in-word
// apostrophes/hyphens stay single tokens.
std::vector<std::string> tokenize(std::string_view text);

std::string join(const std::vector<std::string> &tokens,
                 std::string_view sep = " ");

std::vector<std::string> split(std::string_view s, char sep);

// True if the token looks like "[...]".
bool is_placeholder(std::string_view token);

// True if the token follows the placeholder grammar:
// [<domain>_name|reference|address] or [value_<slot>].
bool is_valid_placeholder(std::string_view token);

// All placeholder tokens in text, in order of appearance.
std::vector<std::string> find_placeholders(std::string_view text);

// "HH:MM" -> minutes since midnight.
std::optional<int> parse_clock(std::string_view s);

}  // namespace dialoforge

#endif  // DIALOFORGE_TEXT_HPP_
