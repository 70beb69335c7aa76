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

// Stage composition shared by the CLI subcommands.

#ifndef MPA_PIPELINE_HPP_
#define MPA_PIPELINE_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mpa/aligner.hpp"
#include "mpa/attn.hpp"
#include "mpa/corpus.hpp"
#include "mpa/metrics.hpp"
#include "mpa/morph_it.hpp"
#include "mpa/text.hpp"

namespace mpa::pipeline {

/// A dump with its own aligner, trained on every (source, translation) pair
/// in the dump, and the Viterbi alignment of each record.
struct AlignedDump {
  std::string label;
  attn::Dump dump;
  align::Model aligner;
  std::vector<text::PreTokens> source;
  std::vector<text::PreTokens> target;
  std::vector<align::Alignment> alignments;  // empty links when untranslatable
};

AlignedDump align_dump(const std::filesystem::path& dir, const align::Config& config,
                       align::Execution exec = align::Execution::Parallel);

/// Filesystem-safe form of a model name.
std::string sanitize_label(std::string_view name);

struct SetEvaluation {
  std::vector<metrics::InstanceOutcome> outcomes;  // in set order
  metrics::ScoreDiagnostics diagnostics;
  metrics::AccuracyReport accuracy;
};

/// Scores every instance against its translation in the dump. Instances
/// without a translation count as Unknown.
SetEvaluation evaluate_set(const AlignedDump& model, std::span<const corpus::WinoInstance> set,
                           const morph::GenderLexicon& lexicon);

/// Combines the pro-set and anti-set evaluations into per-pair outcomes.
/// `pro` and `anti` must come from the sets the pairs were built from.
std::vector<metrics::PairOutcome> pair_outcomes(std::span<const corpus::MinimalPair> pairs,
                                                const SetEvaluation& pro,
                                                const SetEvaluation& anti);

struct AttentionResult {
  attn::Kind kind = attn::Kind::SelfAttention;
  attn::SplitResult splits;
  std::size_t n_members = 0;
  std::vector<std::string> excluded;  // one line per excluded pair member
};

/// Cue-to-profession attention over both members of every accurate pair.
AttentionResult attention_grids(const AlignedDump& model,
                                std::span<const corpus::MinimalPair> pairs,
                                std::span<const metrics::PairOutcome> outcomes, attn::Kind kind,
                                align::Execution exec = align::Execution::Parallel);

/// Line-delimited outcome records.
std::string outcome_records(std::span<const metrics::InstanceOutcome> outcomes);
std::string pair_outcome_records(std::span<const metrics::PairOutcome> outcomes);

}  // namespace mpa::pipeline

#endif  // MPA_PIPELINE_HPP_
