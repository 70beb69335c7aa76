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

// Gender accuracy, Minimal Pair Accuracy (MPA) and the Pro-F / Pro-M
// breakdown of accurate pairs.

#ifndef MPA_METRICS_HPP_
#define MPA_METRICS_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mpa/aligner.hpp"
#include "mpa/corpus.hpp"
#include "mpa/morph_it.hpp"
#include "mpa/text.hpp"

namespace mpa::metrics {

struct InstanceOutcome {
  std::size_t line_no = 0;
  Gender gold = Gender::Unknown;
  morph::GenderVerdict extracted;
  bool correct = false;  // extracted.gender == gold; never true for Unknown
  std::string target_word;  // translated token that was classified, if any
};

/// correct / total for one cell; percent() is 0 for an empty cell.
struct Cell {
  std::size_t correct = 0;
  std::size_t total = 0;

  double percent() const;
};

struct AccuracyReport {
  Cell overall;
  Cell male;
  Cell female;
};

struct PairOutcome {
  std::size_t pair_id = 0;
  Gender stereotype = Gender::Unknown;
  bool pro_correct = false;
  bool anti_correct = false;
  bool extraction_failure = false;  // a member's verdict was Unknown

  bool accurate() const { return pro_correct && anti_correct; }
};

struct MpaReport {
  std::size_t n_pairs = 0;
  std::size_t n_accurate = 0;
  std::size_t n_accurate_f = 0;  // accurate pairs with a feminine stereotype
  std::size_t n_accurate_m = 0;
  std::size_t n_failure_pairs = 0;
  double mpa = 0.0;
  double pro_f = 0.0;
  double pro_m = 0.0;
  /// MPA with extraction-failure pairs dropped from the denominator.
  double mpa_excluding_failures = 0.0;
};

/// Throws UsageError on an empty list.
AccuracyReport gender_accuracy(std::span<const InstanceOutcome> outcomes);

/// Throws UsageError on an empty list. pro_f / pro_m are 0 when no pair is
/// accurate.
MpaReport mpa(std::span<const PairOutcome> pairs);

/// Input to score_instances: a challenge-set row, its translation and the
/// word alignment between the two pre-tokenized sentences. A null
/// `alignment` marks a missing translation.
struct ScoreRecord {
  const corpus::WinoInstance* instance = nullptr;
  const text::PreTokens* source = nullptr;
  const text::PreTokens* target = nullptr;
  const align::Alignment* alignment = nullptr;
};

struct ScoreDiagnostics {
  std::size_t missing_translation = 0;
  std::vector<std::size_t> missing_lines;  // line_no of each missing translation
  std::size_t empty_projection = 0;
  std::size_t unknown_gender = 0;
};

/// Projects each entity through its alignment, classifies the lowest
/// projected non-punctuation target token and compares with the gold label.
/// Failures become Unknown outcomes and are tallied in `diag`.
std::vector<InstanceOutcome> score_instances(std::span<const ScoreRecord> records,
                                             const morph::GenderLexicon& lexicon,
                                             ScoreDiagnostics* diag = nullptr);

/// Target pre-token chosen for an entity: lowest projected index whose token
/// is not punctuation. npos when the projection is empty.
std::size_t entity_target_token(const corpus::WinoInstance& instance,
                                const text::PreTokens& source, const text::PreTokens& target,
                                const align::Alignment& alignment);

/// 100 * num / den to two decimals, rounding half up; "0.00" for den = 0.
std::string format_percent(std::size_t num, std::size_t den);

/// Line-delimited {metric, cell, value, numerator, denominator} records.
std::string accuracy_records(const AccuracyReport& report, std::string_view metric);
std::string mpa_records(const MpaReport& report, bool diagnostics);

}  // namespace mpa::metrics

#endif  // MPA_METRICS_HPP_
