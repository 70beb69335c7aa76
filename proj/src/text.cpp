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

#include "mpa/text.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "mpa/errors.hpp"

namespace mpa::text {
namespace {

struct CodePoint {
  UChar32 value;
  std::size_t begin;
  std::size_t end;
};

std::vector<CodePoint> decode(std::string_view s) {
  std::vector<CodePoint> out;
  const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
  const int32_t length = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    out.push_back({c, static_cast<std::size_t>(start), static_cast<std::size_t>(i)});
  }
  return out;
}

bool punct_cp(UChar32 c) {
  if (c < 0) return false;
  if (u_ispunct(c)) return true;
  switch (u_charType(c)) {
    case U_MATH_SYMBOL:
    case U_CURRENCY_SYMBOL:
    case U_MODIFIER_SYMBOL:
    case U_OTHER_SYMBOL:
      return true;
    default:
      return false;
  }
}

bool apostrophe_cp(UChar32 c) { return c == 0x27 || c == 0x2019; }

bool ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

std::string nfc(std::string_view s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  icu::UnicodeString in = icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  icu::UnicodeString out = norm->normalize(in, status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");
  std::string result;
  out.toUTF8String(result);
  return result;
}

std::string lower(std::string_view s) {
  icu::UnicodeString in = icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  in.toLower(icu::Locale::getRoot());
  std::string result;
  in.toUTF8String(result);
  return nfc(result);
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && ascii_space(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !ascii_space(s[i])) ++i;
    if (i > start) words.emplace_back(s.substr(start, i - start));
  }
  return words;
}

bool is_punct(std::string_view s) {
  if (s.empty()) return false;
  for (const auto& cp : decode(s))
    if (!punct_cp(cp.value)) return false;
  return true;
}

std::string strip_punct(std::string_view s) {
  const auto cps = decode(s);
  std::size_t lo = 0, hi = cps.size();
  while (lo < hi && punct_cp(cps[lo].value)) ++lo;
  while (hi > lo && punct_cp(cps[hi - 1].value)) --hi;
  if (lo == hi) return {};
  return std::string(s.substr(cps[lo].begin, cps[hi - 1].end - cps[lo].begin));
}

std::size_t PreTokens::first_content_token(std::size_t word) const {
  std::size_t first = std::string::npos;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (word_of[t] != word) continue;
    if (first == std::string::npos) first = t;
    if (!is_punct(tokens[t])) return t;
  }
  return first;
}

PreTokens pretokenize(std::string_view sentence) {
  PreTokens out;
  const auto words = split_words(sentence);
  out.n_words = words.size();
  for (std::size_t w = 0; w < words.size(); ++w) {
    const std::string word = nfc(words[w]);
    const auto cps = decode(word);
    auto emit = [&](std::size_t from, std::size_t to) {  // code point range
      out.tokens.push_back(word.substr(cps[from].begin, cps[to - 1].end - cps[from].begin));
      out.word_of.push_back(w);
    };

    std::size_t lo = 0, hi = cps.size();
    while (lo < hi && punct_cp(cps[lo].value)) ++lo;
    while (hi > lo && punct_cp(cps[hi - 1].value)) --hi;
    if (lo == hi) {
      for (std::size_t i = 0; i < cps.size(); ++i) emit(i, i + 1);
      continue;
    }
    // Elided forms ("l'", "dell'") keep their final apostrophe.
    if (hi + 1 == cps.size() && apostrophe_cp(cps[hi].value)) ++hi;

    for (std::size_t i = 0; i < lo; ++i) emit(i, i + 1);
    std::size_t start = lo;
    for (std::size_t i = lo; i < hi; ++i) {
      if (apostrophe_cp(cps[i].value) && i + 1 < hi && !punct_cp(cps[i + 1].value)) {
        emit(start, i + 1);
        start = i + 1;
      }
    }
    emit(start, hi);
    for (std::size_t i = hi; i < cps.size(); ++i) emit(i, i + 1);
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace mpa::text
