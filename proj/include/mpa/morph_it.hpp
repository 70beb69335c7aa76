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

// Grammatical gender of an Italian profession noun in context.
//
// The decision cascade, first match wins:
//   1. lexicon entry m/f for the token;
//   2. a determiner among the two preceding tokens (nearest first);
//   3. suffix rules (skipped for lexicon entries tagged d);
//   4. Unknown.

#ifndef MPA_MORPH_IT_HPP_
#define MPA_MORPH_IT_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "mpa/corpus.hpp"

namespace mpa::morph {

enum class LexiconTag { Masculine, Feminine, DeterminerDecides };

enum class Evidence { Lexicon, Determiner, Suffix, None };

std::string_view to_string(Evidence e);

struct GenderVerdict {
  Gender gender = Gender::Unknown;
  Evidence evidence = Evidence::None;

  bool operator==(const GenderVerdict&) const = default;
};

class GenderLexicon {
 public:
  /// Parses "form<TAB>m|f|d" lines; '#' starts a comment line. Forms are
  /// lowercased and NFC-normalized. Consistent duplicates collapse;
  /// conflicting ones throw ValidationError naming both lines.
  static GenderLexicon parse(std::string_view text);

  std::optional<LexiconTag> find(std::string_view form) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, LexiconTag>& entries() const { return entries_; }

 private:
  std::map<std::string, LexiconTag> entries_;
};

/// Gender signalled by a (lowercased) Italian determiner. nullopt for
/// non-determiners and for forms that mark no gender (l', gli, le, i).
std::optional<Gender> determiner_gender(std::string_view token);

enum class SuffixClass { Masculine, Feminine, Epicene, NoRule };

/// Suffix rule for a lowercased token.
SuffixClass suffix_class(std::string_view token);

/// Total over valid indices; throws UsageError when `index` is out of range.
GenderVerdict classify_gender(std::span<const std::string> tokens, std::size_t index,
                              const GenderLexicon& lexicon);

}  // namespace mpa::morph

#endif  // MPA_MORPH_IT_HPP_
