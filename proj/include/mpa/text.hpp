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

#ifndef MPA_TEXT_HPP_
#define MPA_TEXT_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mpa::text {

/// Unicode NFC normalization of UTF-8 text.
std::string nfc(std::string_view s);

/// Locale-independent full lowercase of UTF-8 text (NFC output).
std::string lower(std::string_view s);

/// Splits on runs of ASCII whitespace. This is the word segmentation that
/// challenge-set entity indices and dump span maps refer to.
std::vector<std::string> split_words(std::string_view s);

/// True when every code point of `s` is punctuation or a symbol. Empty
/// strings are not punctuation.
bool is_punct(std::string_view s);

/// Removes leading and trailing punctuation code points.
std::string strip_punct(std::string_view s);

/// Word-level tokens plus, for each token, the whitespace word it came from.
struct PreTokens {
  std::vector<std::string> tokens;
  std::vector<std::size_t> word_of;
  std::size_t n_words = 0;

  /// First token index of whitespace word `word` that is not punctuation,
  /// falling back to its first token. npos when the word does not exist.
  std::size_t first_content_token(std::size_t word) const;
};

/// Whitespace-plus-punctuation tokenizer used on both sides of the aligner.
/// Text is NFC-normalized; leading and trailing punctuation characters become
/// single-character tokens and a word-internal apostrophe closes a token
/// ("l'analista" -> "l'", "analista").
PreTokens pretokenize(std::string_view sentence);

/// Joins with single spaces.
std::string join(const std::vector<std::string>& parts, std::string_view sep = " ");

}  // namespace mpa::text

#endif  // MPA_TEXT_HPP_
