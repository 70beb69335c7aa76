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

// Lexical translation model with a diagonal positional prior, trained by
// EM, and Viterbi word alignment under it.
//
// For a source sentence e of length m and a target sentence f of length n,
// target word j links to source position i (or to NULL) with probability
//
//   delta(i | j, m, n) * t(f_j | e_i)
//
// where delta(NULL) = p_null and, for real positions,
//
//   delta(i | j, m, n) = (1 - p_null) * exp(-lambda * |(i+1)/m - (j+1)/n|) / Z
//
// with Z summing the exponentials over i. Only t is estimated; lambda and
// p_null stay fixed.

#ifndef MPA_ALIGNER_HPP_
#define MPA_ALIGNER_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mpa::align {

struct Config {
  int iterations = 5;
  double lambda = 4.0;
  double p_null = 0.08;
};

using Sentence = std::vector<std::string>;

struct SentencePair {
  Sentence source;
  Sentence target;
};

struct Link {
  std::size_t target;
  std::optional<std::size_t> source;  // nullopt = NULL link

  bool operator==(const Link&) const = default;
};

/// One link per target position, in target order.
struct Alignment {
  std::vector<Link> links;
  std::size_t source_len = 0;
  std::size_t target_len = 0;
};

/// Normalized positional prior for a real source position i (0-based).
double diagonal_prior(std::size_t i, std::size_t j, std::size_t m, std::size_t n,
                      double lambda, double p_null);

/// diagonal_prior for every i in [0, m) at once; `out` must hold m values.
void diagonal_priors(std::size_t j, std::size_t m, std::size_t n, double lambda, double p_null,
                     std::span<double> out);

/// String <-> dense id map. Id 0 on the source side is reserved for NULL.
class Vocab {
 public:
  std::uint32_t intern(std::string_view word);
  std::optional<std::uint32_t> find(std::string_view word) const;
  const std::string& word(std::uint32_t id) const { return words_[id]; }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::string> words_;
};

/// Sparse t(f|e) table over co-occurring pairs. Row e holds target ids in
/// ascending order; entries live in one flat array.
struct TTable {
  std::vector<std::size_t> row_begin;  // size = n_source + 1
  std::vector<std::uint32_t> target;   // flat, sorted within a row
  std::vector<double> prob;            // flat, parallel to `target`

  std::size_t rows() const { return row_begin.empty() ? 0 : row_begin.size() - 1; }
  /// Flat slot of (e, f), or npos when the pair never co-occurred.
  std::size_t slot(std::uint32_t e, std::uint32_t f) const;
};

/// Integerized corpus plus the precomputed t-table slot for every
/// (target position, source position or NULL) cell of every sentence.
struct IndexedCorpus {
  struct Sent {
    std::size_t m = 0;  // source length (without NULL)
    std::size_t n = 0;  // target length
    std::size_t offset = 0;  // into `slots`; n * (m + 1) entries, NULL first
  };
  std::vector<Sent> sents;
  std::vector<std::size_t> slots;
  std::size_t total_cells = 0;
};

enum class Execution { Serial, Parallel };

/// One E-step over the whole corpus. Adds posterior link counts into
/// `counts` (indexed like TTable::prob) and returns the corpus
/// log-likelihood under the current table. Both kernels accumulate in
/// sentence order, then target position, then source position, so their
/// results are bitwise identical.
double estep_serial(const IndexedCorpus& corpus, const TTable& table, const Config& config,
                    std::span<double> counts);
double estep_parallel(const IndexedCorpus& corpus, const TTable& table, const Config& config,
                      std::span<double> counts);

class Model {
 public:
  Model() = default;

  bool trained() const { return trained_; }
  const Config& config() const { return config_; }

  /// t(f|e); 0 for pairs never seen together or unknown words.
  double prob(std::string_view target, std::string_view source) const;
  /// t(f|NULL).
  double null_prob(std::string_view target) const;

  /// Log-likelihood before each EM iteration, then after the last one
  /// (iterations + 1 values).
  const std::vector<double>& log_likelihood() const { return log_likelihood_; }

  const Vocab& source_vocab() const { return source_vocab_; }
  const Vocab& target_vocab() const { return target_vocab_; }
  const TTable& table() const { return table_; }

 private:
  friend Model train(std::span<const SentencePair>, const Config&, Execution);
  friend Alignment viterbi_align(const Model&, const Sentence&, const Sentence&);

  bool trained_ = false;
  Config config_;
  Vocab source_vocab_;  // id 0 = NULL
  Vocab target_vocab_;
  TTable table_;
  std::vector<double> log_likelihood_;
};

/// EM training. Throws UsageError on an empty corpus, an empty sentence or
/// iterations < 1, NumericError if the likelihood stops being finite.
Model train(std::span<const SentencePair> corpus, const Config& config = {},
            Execution exec = Execution::Parallel);

/// Per target word, the source position maximizing delta * t, or NULL when
/// p_null * t(f|NULL) beats every real position. Ties go to the smallest
/// source index. Unseen target words are linked by delta alone.
Alignment viterbi_align(const Model& model, const Sentence& source, const Sentence& target);

/// Target positions linked to `source_index`, ascending. Possibly empty.
std::vector<std::size_t> project_index(const Alignment& alignment, std::size_t source_index);

/// "j-i" pairs (target-source, 0-based), NULL links omitted, space-separated.
std::string to_pharaoh(const Alignment& alignment);

/// Parses one "source ||| target" line of pre-tokenized text.
SentencePair parse_parallel_line(std::string_view line);

}  // namespace mpa::align

#endif  // MPA_ALIGNER_HPP_
