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

// Attention between a gender cue and a profession noun, per layer and head.

#ifndef MPA_ATTN_HPP_
#define MPA_ATTN_HPP_

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mpa/aligner.hpp"
#include "mpa/corpus.hpp"
#include "mpa/errors.hpp"

namespace mpa::attn {

/// Half-open subword index range.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return end <= begin; }
  bool operator==(const Span&) const = default;
};

class MappingFailure : public Error {
 public:
  using Error::Error;
};

/// Dense [layer][head][query][key] attention weights, row-major.
struct Tensor4 {
  std::array<std::size_t, 4> shape{};
  std::vector<float> data;

  std::size_t index(std::size_t l, std::size_t h, std::size_t q, std::size_t k) const {
    return ((l * shape[1] + h) * shape[2] + q) * shape[3] + k;
  }
  float at(std::size_t l, std::size_t h, std::size_t q, std::size_t k) const {
    return data[index(l, h, q, k)];
  }
};

/// Throws ValidationError naming `sentence_id` when some row does not sum
/// to 1 within `tolerance` or holds a non-finite or negative value.
void validate_rows(const Tensor4& tensor, std::string_view sentence_id, double tolerance = 1e-3);

/// n_layers x n_heads matrix of doubles, layer-major.
struct HeadMatrix {
  std::size_t n_layers = 0;
  std::size_t n_heads = 0;
  std::vector<double> values;

  HeadMatrix() = default;
  HeadMatrix(std::size_t layers, std::size_t heads)
      : n_layers(layers), n_heads(heads), values(layers * heads, 0.0) {}

  double& at(std::size_t l, std::size_t h) { return values[l * n_heads + h]; }
  double at(std::size_t l, std::size_t h) const { return values[l * n_heads + h]; }
};

enum class Kind { SelfAttention, CrossAttention };
std::string_view to_string(Kind k);  // "self" / "cross"

/// Mean of tensor[l][h][q][k] over q in `query`, k in `key`, for every layer
/// and head. Throws UsageError for empty or out-of-range spans.
HeadMatrix cue_target_weight(const Tensor4& tensor, Span query, Span key);

enum class Split { All, MasculineCue, FeminineCue, ProStereo, AntiStereo };
std::string_view to_string(Split s);  // "all", "masculine_cue", ...
inline constexpr std::array<Split, 5> kAllSplits = {Split::All, Split::MasculineCue,
                                                    Split::FeminineCue, Split::ProStereo,
                                                    Split::AntiStereo};

struct HeatmapGrid {
  Split split = Split::All;
  HeadMatrix mean;
  std::size_t count = 0;  // contributing instances, the same for every cell
};

/// Cell-wise mean with compensated summation in input order. Throws
/// UsageError for an empty list or mismatched shapes.
HeatmapGrid aggregate(std::span<const HeadMatrix> matrices, Split split);

enum class Tier { Salient, Strong };
std::string_view to_string(Tier t);

struct Thresholds {
  double salient = 1.5;  // multiples of the uniform baseline
  double strong = 2.0;
};

struct FlaggedHead {
  std::size_t layer = 0;
  std::size_t head = 0;
  double value = 0.0;
  Tier tier = Tier::Salient;
};

/// Uniform-attention baseline 1 / mean_sentence_length.
double uniform_baseline(double mean_sentence_length);

/// Cells at or above thresholds.salient * baseline, strongest first (ties in
/// layer-major order). Throws UsageError when mean_sentence_length <= 0.
std::vector<FlaggedHead> flag_heads(const HeatmapGrid& grid, double mean_sentence_length,
                                    const Thresholds& thresholds = {});

/// Attention weights of one accurate-pair member.
struct MemberWeights {
  HeadMatrix weights;
  Gender cue_gender = Gender::Unknown;
  bool pro = false;
};

struct SplitResult {
  std::vector<HeatmapGrid> grids;  // in kAllSplits order, empty splits left out
  std::vector<Split> omitted;
};

/// Grids for every split; a split without members is listed in `omitted`.
SplitResult split_and_aggregate(std::span<const MemberWeights> members);

// ---------------------------------------------------------------------------
// Subword mapping

enum class MarkerScheme {
  SentencePiece,  // "▁" opens a word
  Bpe,            // "@@" closes a non-final piece
  ByteLevel,      // "Ġ" opens a word
  None,
};

/// Guesses the scheme from marker usage in `subwords`.
MarkerScheme detect_marker_scheme(std::span<const std::string> subwords);

/// <s>, </s>, <pad>, <unk>, __xx__ and language tags such as it_IT or ita_Latn.
bool is_special_token(std::string_view subword);

/// Span of every word, found by matching stripped subwords against the
/// words left to right. Special tokens are skipped. Throws MappingFailure
/// when the subwords do not spell out the words.
std::vector<Span> map_words_to_subwords(std::span<const std::string> words,
                                        std::span<const std::string> subwords,
                                        MarkerScheme scheme);

/// The span of one word; see map_words_to_subwords.
Span map_word_to_subwords(std::size_t word_index, std::span<const std::string> words,
                          std::span<const std::string> subwords, MarkerScheme scheme);

// ---------------------------------------------------------------------------
// Dump directory

struct Manifest {
  std::string model_name;
  std::size_t n_layers_enc = 0;
  std::size_t n_heads_enc = 0;
  std::size_t n_layers_dec = 0;
  std::size_t n_heads_dec = 0;
  std::string spans = "exact";  // "fallback" when spans come from markers
};

struct SentenceRecord {
  std::string sentence_id;
  std::string source_text;
  std::string translation_text;
  std::vector<std::string> src_subwords;
  std::vector<std::string> tgt_subwords;
  /// One span per whitespace word; an empty span marks a word whose
  /// subwords could not be determined.
  std::vector<Span> src_word_spans;
  std::vector<Span> tgt_word_spans;
  std::string enc_file;
  std::string xattn_file;  // empty when absent
  std::array<std::size_t, 4> enc_shape{};
  std::array<std::size_t, 4> xattn_shape{};
  std::string mapping_error;  // set when fallback mapping failed
};

class Dump {
 public:
  /// Reads manifest.json and sentences.jsonl and validates shapes and span
  /// maps. Tensors are read lazily.
  static Dump open(const std::filesystem::path& dir);

  const std::filesystem::path& dir() const { return dir_; }
  const Manifest& manifest() const { return manifest_; }
  const std::vector<SentenceRecord>& sentences() const { return sentences_; }

  /// First record whose source_text equals `text`.
  std::optional<std::size_t> find_source(std::string_view text) const;

  /// Loads and row-validates a tensor.
  Tensor4 load(std::size_t record, Kind kind) const;
  bool has_cross(std::size_t record) const { return !sentences_[record].xattn_file.empty(); }

 private:
  std::filesystem::path dir_;
  Manifest manifest_;
  std::vector<SentenceRecord> sentences_;
  std::vector<std::pair<std::string, std::size_t>> by_source_;  // sorted
};

/// Reads a raw little-endian f32 file of the given shape.
Tensor4 read_tensor(const std::filesystem::path& file, const std::array<std::size_t, 4>& shape);

/// Writes a tensor in the dump's raw f32 layout.
void write_tensor(const std::filesystem::path& file, const Tensor4& tensor);

// ---------------------------------------------------------------------------
// Batched extraction

struct ExtractJob {
  std::size_t record = 0;
  Span query;
  Span key;
};

/// cue_target_weight for every job, in job order. Throws the first failing
/// job's error.
std::vector<HeadMatrix> extract_serial(const Dump& dump, std::span<const ExtractJob> jobs,
                                       Kind kind);
/// OpenMP version of extract_serial with identical results.
std::vector<HeadMatrix> extract_parallel(const Dump& dump, std::span<const ExtractJob> jobs,
                                         Kind kind);

}  // namespace mpa::attn

#endif  // MPA_ATTN_HPP_
