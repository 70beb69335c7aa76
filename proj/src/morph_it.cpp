// Copyright 2026 The mpa-eval Authors.
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

#include "mpa/morph_it.hpp"

#include <array>

#include "mpa/text.hpp"

namespace mpa::morph {
namespace {

constexpr std::array<std::string_view, 14> kMasculineDeterminers = {
    "il", "lo", "un", "uno", "del", "al", "dal", "nel", "sul",
    "dello", "allo", "dallo", "nello", "sullo"};
constexpr std::array<std::string_view, 8> kFeminineDeterminers = {
    "la", "una", "un'", "della", "alla", "dalla", "nella", "sulla"};

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string normalize_apostrophe(std::string s) {
  // U+2019 RIGHT SINGLE QUOTATION MARK -> ASCII apostrophe.
  static constexpr std::string_view kCurly = "\xE2\x80\x99";
  for (std::size_t at = s.find(kCurly); at != std::string::npos; at = s.find(kCurly, at))
    s.replace(at, kCurly.size(), "'");
  return s;
}

}  // namespace

std::string_view to_string(Evidence e) {
  switch (e) {
    case Evidence::Lexicon:
      return "lexicon";
    case Evidence::Determiner:
      return "determiner";
    case Evidence::Suffix:
      return "suffix";
    case Evidence::None:
      break;
  }
  return "none";
}

GenderLexicon GenderLexicon::parse(std::string_view text) {
  GenderLexicon lex;
  std::map<std::string, std::size_t> first_line;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos || line.find('\t', tab + 1) != std::string_view::npos)
      throw ParseError("expected 'form<TAB>m|f|d'", line_no);
    const std::string form = normalize_apostrophe(text::lower(line.substr(0, tab)));
    const std::string_view tag_text = line.substr(tab + 1);
    if (form.empty()) throw ParseError("empty form", line_no);

    LexiconTag tag;
    if (tag_text == "m") {
      tag = LexiconTag::Masculine;
    } else if (tag_text == "f") {
      tag = LexiconTag::Feminine;
    } else if (tag_text == "d") {
      tag = LexiconTag::DeterminerDecides;
    } else {
      throw ParseError("unknown gender tag '" + std::string(tag_text) + "'", line_no);
    }

    auto [it, inserted] = lex.entries_.emplace(form, tag);
    if (inserted) {
      first_line.emplace(form, line_no);
    } else if (it->second != tag) {
      throw ValidationError("lexicon: conflicting entries for '" + form + "' on lines " +
                            std::to_string(first_line.at(form)) + " and " +
                            std::to_string(line_no));
    }
  }
  return lex;
}

std::optional<LexiconTag> GenderLexicon::find(std::string_view form) const {
  const auto it = entries_.find(std::string(form));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::optional<Gender> determiner_gender(std::string_view token) {
  for (auto d : kMasculineDeterminers)
    if (token == d) return Gender::Masculine;
  for (auto d : kFeminineDeterminers)
    if (token == d) return Gender::Feminine;
  return std::nullopt;
}

SuffixClass suffix_class(std::string_view token) {
  if (ends_with(token, "ista") || ends_with(token, "ente") || ends_with(token, "ante"))
    return SuffixClass::Epicene;
  if (ends_with(token, "tore")) return SuffixClass::Masculine;
  if (ends_with(token, "trice") || ends_with(token, "essa")) return SuffixClass::Feminine;
  if (ends_with(token, "o")) return SuffixClass::Masculine;
  if (ends_with(token, "a")) return SuffixClass::Feminine;
  if (ends_with(token, "e")) return SuffixClass::Epicene;
  return SuffixClass::NoRule;
}

GenderVerdict classify_gender(std::span<const std::string> tokens, std::size_t index,
                              const GenderLexicon& lexicon) {
  if (index >= tokens.size())
    throw UsageError("classify_gender: index " + std::to_string(index) + " out of range for " +
                     std::to_string(tokens.size()) + " tokens");

  const std::string token = normalize_apostrophe(text::lower(tokens[index]));
  const auto tag = lexicon.find(token);
  if (tag == LexiconTag::Masculine) return {Gender::Masculine, Evidence::Lexicon};
  if (tag == LexiconTag::Feminine) return {Gender::Feminine, Evidence::Lexicon};

  for (std::size_t back = 1; back <= 2 && back <= index; ++back) {
    const std::string prev = normalize_apostrophe(text::lower(tokens[index - back]));
    if (auto g = determiner_gender(prev)) return {*g, Evidence::Determiner};
  }

  if (tag == LexiconTag::DeterminerDecides) return {};
  switch (suffix_class(token)) {
    case SuffixClass::Masculine:
      return {Gender::Masculine, Evidence::Suffix};
    case SuffixClass::Feminine:
      return {Gender::Feminine, Evidence::Suffix};
    case SuffixClass::Epicene:
    case SuffixClass::NoRule:
      break;
  }
  return {};
}

}  // namespace mpa::morph
