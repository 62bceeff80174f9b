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

#include "dialoforge/text.hpp"

#include <cctype>

#include "dialoforge/domain.hpp"

namespace dialoforge {

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Punctuation that stays inside a token when flanked by the right characters.
bool joins_token(std::string_view text, std::size_t i) {
  if (i == 0 || i + 1 >= text.size()) return false;
  char prev = text[i - 1];
  char next = text[i + 1];
  switch (text[i]) {
    case ':':
    case '.':
      return is_digit(prev) && is_digit(next);
    case '\'':
    case '-':
      return is_word_char(prev) && is_word_char(next);
    default:
      return false;
  }
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char &c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(to_lower(current));
    current.clear();
  };
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '[') {
      std::size_t close = text.find(']', i);
      if (close != std::string_view::npos) {
        flush();
        tokens.push_back(to_lower(text.substr(i, close - i + 1)));
        i = close + 1;
        continue;
      }
    }
    if (c == '<') {
      // Special markers such as <eod>.
      std::size_t close = text.find('>', i);
      if (close != std::string_view::npos && close > i + 1) {
        bool word = true;
        for (std::size_t j = i + 1; j < close; ++j) word = word && (is_word_char(text[j]) || text[j] == '/');
        if (word) {
          flush();
          tokens.push_back(to_lower(text.substr(i, close - i + 1)));
          i = close + 1;
          continue;
        }
      }
    }
    if (is_space(c)) {
      flush();
    } else if (is_word_char(c) || joins_token(text, i)) {
      current.push_back(c);
    } else {
      flush();
      tokens.emplace_back(1, c);
    }
    ++i;
  }
  flush();
  return tokens;
}

std::string join(const std::vector<std::string> &tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(tokens[i]);
  }
  return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(s.substr(start));
      break;
    }
    parts.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

bool is_placeholder(std::string_view token) {
  return token.size() > 2 && token.front() == '[' && token.back() == ']';
}

bool is_valid_placeholder(std::string_view token) {
  if (!is_placeholder(token)) return false;
  std::string_view body = token.substr(1, token.size() - 2);
  for (char c : body) {
    if (!(std::islower(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  std::size_t us = body.find('_');
  if (us == std::string_view::npos || us == 0 || us + 1 >= body.size()) return false;
  std::string_view head = body.substr(0, us);
  std::string_view tail = body.substr(us + 1);
  if (head == "value") return tail.back() != '_';
  if (!parse_domain(head)) return false;
  return tail == "name" || tail == "reference" || tail == "address";
}

std::vector<std::string> find_placeholders(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while ((i = text.find('[', i)) != std::string_view::npos) {
    std::size_t close = text.find(']', i);
    if (close == std::string_view::npos) break;
    out.emplace_back(text.substr(i, close - i + 1));
    i = close + 1;
  }
  return out;
}

std::optional<int> parse_clock(std::string_view s) {
  std::size_t colon = s.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 3 != s.size()) return std::nullopt;
  int h = 0, m = 0;
  for (std::size_t i = 0; i < colon; ++i) {
    if (!is_digit(s[i])) return std::nullopt;
    h = h * 10 + (s[i] - '0');
  }
  for (std::size_t i = colon + 1; i < s.size(); ++i) {
    if (!is_digit(s[i])) return std::nullopt;
    m = m * 10 + (s[i] - '0');
  }
  if (h > 23 || m > 59) return std::nullopt;
  return h * 60 + m;
}

}  // namespace dialoforge
