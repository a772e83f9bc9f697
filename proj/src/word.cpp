// Part of the ncfact project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "ncfact/word.hpp"

#include <cctype>
#include <charconv>

#include "ncfact/errors.hpp"

namespace ncfact {

namespace {

Letter parse_letter(std::string_view token, int max_gen) {
  if (token.size() < 2 || token[0] != 'x') {
    throw InputError("malformed word token '" + std::string(token) + "'");
  }
  bool starred = false;
  std::string_view digits = token.substr(1);
  if (!digits.empty() && digits.back() == '*') {
    starred = true;
    digits.remove_suffix(1);
  }
  int index = 0;
  auto res = std::from_chars(digits.data(), digits.data() + digits.size(), index);
  if (res.ec != std::errc{} || res.ptr != digits.data() + digits.size()) {
    throw InputError("malformed word token '" + std::string(token) + "'");
  }
  if (index < 1) {
    throw InputError("generator index must be >= 1 in token '" + std::string(token) + "'");
  }
  if (index > max_gen) {
    throw InputError("generator index " + std::to_string(index) + " exceeds maximum " +
                     std::to_string(max_gen));
  }
  return Letter{index, starred};
}

}  // namespace

Word parse_word(std::string_view text, int max_gen) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) tokens.push_back(text.substr(start, i - start));
  }
  if (tokens.empty()) {
    throw InputError("empty word string; the unit word is written \"1\"");
  }
  if (tokens.size() == 1 && tokens[0] == "1") return Word::unit();
  std::vector<Letter> letters;
  letters.reserve(tokens.size());
  for (auto tok : tokens) {
    if (tok == "1") {
      throw InputError("the unit token \"1\" must stand alone in a word");
    }
    letters.push_back(parse_letter(tok, max_gen));
  }
  return Word(std::move(letters));
}

std::string format_word(const Word& w) {
  if (w.is_unit()) return "1";
  std::string out;
  bool first = true;
  for (const auto& l : w.letters()) {
    if (!first) out += ' ';
    first = false;
    out += 'x';
    out += std::to_string(l.gen_index);
    if (l.starred) out += '*';
  }
  return out;
}

}  // namespace ncfact
