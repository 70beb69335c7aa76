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

// WinoMT challenge sets: parsing, gender-cue detection and minimal pairs.

#ifndef MPA_CORPUS_HPP_
#define MPA_CORPUS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mpa/errors.hpp"

namespace mpa {

enum class Gender { Masculine, Feminine, Unknown };

/// "masculine" / "feminine" / "unknown".
std::string_view to_string(Gender g);

namespace corpus {

/// One challenge-set row.
struct WinoInstance {
  Gender gold_gender = Gender::Unknown;
  std::size_t entity_index = 0;  // whitespace word index of the profession
  std::string sentence;
  std::string profession;
  std::size_t line_no = 0;  // 1-based line in the source file
};

struct CueSpan {
  std::string pronoun;  // lowercased
  std::size_t cue_index = 0;
  Gender cue_gender = Gender::Unknown;
};

class NoCueError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Parses WinoMT text: `gender<TAB>index<TAB>sentence<TAB>profession` per
/// line, "male"/"female" genders, blank lines skipped. Throws ParseError for
/// malformed lines and ValidationError when the index is out of range. A
/// profession that does not match the indexed word is reported to `diag`.
std::vector<WinoInstance> parse_winomt(std::string_view text, Diagnostics* diag = nullptr);

/// Inverse of parse_winomt for canonical input; one LF-terminated line per
/// instance.
std::string serialize_winomt(std::span<const WinoInstance> instances);

/// First pronoun from {he, she, him, her, his}, matched case-insensitively on
/// a whole whitespace token with surrounding punctuation removed.
std::optional<CueSpan> find_cue(const WinoInstance& instance);

/// As find_cue, but throws NoCueError when the sentence has no pronoun.
CueSpan detect_cue(const WinoInstance& instance);

/// Sentence with the cue pronoun replaced by "#CUE#" (punctuation kept).
std::string cue_template(const WinoInstance& instance, const CueSpan& cue);

struct PairMember {
  WinoInstance instance;
  CueSpan cue;
};

struct MinimalPair {
  std::size_t pair_id = 0;
  PairMember pro;
  PairMember anti;
  std::string profession;
  Gender stereotype_gender = Gender::Unknown;  // gold gender of `pro`
};

enum class PairSide { Pro, Anti };

/// An instance that could not be paired, with the reason.
struct Unmatched {
  PairSide side;
  std::size_t line_no;
  std::string reason;
};

struct PairingResult {
  std::vector<MinimalPair> pairs;
  std::vector<Unmatched> unmatched;
};

/// Matches pro and anti instances on (cue template, entity index,
/// profession). Pairs are numbered in pro-set order. A key that occurs twice
/// within one set throws ValidationError naming the colliding lines.
PairingResult build_minimal_pairs(std::span<const WinoInstance> pro_set,
                                  std::span<const WinoInstance> anti_set);

/// Line-delimited JSON records
/// {pair_id, pro_line_no, anti_line_no, profession, stereotype_gender}.
std::string serialize_pairs(std::span<const MinimalPair> pairs);
std::string serialize_unmatched(std::span<const Unmatched> unmatched);

/// Mean whitespace word count over both members of every pair.
double mean_pair_length(std::span<const MinimalPair> pairs);

}  // namespace corpus
}  // namespace mpa

#endif  // MPA_CORPUS_HPP_
