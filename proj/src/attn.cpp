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

#include <algorithm>
#include <cmath>

#include "mpa/attn.hpp"
#include "mpa/text.hpp"

namespace mpa::attn {
namespace {

constexpr std::string_view kSentencePieceMark = "\xE2\x96\x81";  // U+2581
constexpr std::string_view kByteLevelMark = "\xC4\xA0";          // U+0120

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }
bool ends_with(std::string_view s, std::string_view p) {
  return s.size() >= p.size() && s.substr(s.size() - p.size()) == p;
}

bool is_lower_ascii(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}
bool is_upper_ascii(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

std::string strip_markers(std::string_view s, MarkerScheme scheme) {
  std::string out(s);
  auto erase_all = [&](std::string_view mark) {
    for (std::size_t at = out.find(mark); at != std::string::npos; at = out.find(mark, at))
      out.erase(at, mark.size());
  };
  switch (scheme) {
    case MarkerScheme::SentencePiece:
      erase_all(kSentencePieceMark);
      break;
    case MarkerScheme::ByteLevel:
      erase_all(kByteLevelMark);
      break;
    case MarkerScheme::Bpe:
      if (ends_with(out, "@@")) out.resize(out.size() - 2);
      break;
    case MarkerScheme::None:
      break;
  }
  return text::nfc(out);
}

// Neumaier compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

}  // namespace

std::string_view to_string(Kind k) { return k == Kind::SelfAttention ? "self" : "cross"; }

std::string_view to_string(Split s) {
  switch (s) {
    case Split::All:
      return "all";
    case Split::MasculineCue:
      return "masculine_cue";
    case Split::FeminineCue:
      return "feminine_cue";
    case Split::ProStereo:
      return "pro_stereo";
    case Split::AntiStereo:
      return "anti_stereo";
  }
  return "all";
}

std::string_view to_string(Tier t) { return t == Tier::Strong ? "strong" : "salient"; }

void validate_rows(const Tensor4& tensor, std::string_view sentence_id, double tolerance) {
  const std::size_t rows = tensor.shape[0] * tensor.shape[1] * tensor.shape[2];
  const std::size_t width = tensor.shape[3];
  for (std::size_t r = 0; r < rows; ++r) {
    const float* row = tensor.data.data() + r * width;
    double sum = 0.0;
    for (std::size_t k = 0; k < width; ++k) {
      if (!std::isfinite(row[k]) || row[k] < 0.0f)
        throw ValidationError("sentence " + std::string(sentence_id) +
                              ": attention weight is negative or not finite");
      sum += row[k];
    }
    if (std::fabs(sum - 1.0) > tolerance) {
      const std::size_t q = r % tensor.shape[2];
      const std::size_t h = (r / tensor.shape[2]) % tensor.shape[1];
      const std::size_t l = r / (tensor.shape[2] * tensor.shape[1]);
      throw ValidationError("sentence " + std::string(sentence_id) + ": attention row [" +
                            std::to_string(l) + "][" + std::to_string(h) + "][" +
                            std::to_string(q) + "] sums to " + std::to_string(sum));
    }
  }
}

HeadMatrix cue_target_weight(const Tensor4& tensor, Span query, Span key) {
  if (query.empty() || key.empty()) throw UsageError("cue_target_weight: empty span");
  if (query.end > tensor.shape[2] || key.end > tensor.shape[3])
    throw UsageError("cue_target_weight: span outside tensor");
  HeadMatrix out(tensor.shape[0], tensor.shape[1]);
  const double cells = static_cast<double>(query.size() * key.size());
  for (std::size_t l = 0; l < tensor.shape[0]; ++l) {
    for (std::size_t h = 0; h < tensor.shape[1]; ++h) {
      double sum = 0.0;
      for (std::size_t q = query.begin; q < query.end; ++q)
        for (std::size_t k = key.begin; k < key.end; ++k) sum += tensor.at(l, h, q, k);
      out.at(l, h) = sum / cells;
    }
  }
  return out;
}

HeatmapGrid aggregate(std::span<const HeadMatrix> matrices, Split split) {
  if (matrices.empty()) throw UsageError("aggregate: no matrices");
  const std::size_t layers = matrices.front().n_layers, heads = matrices.front().n_heads;
  std::vector<CompensatedSum> acc(layers * heads);
  for (const auto& m : matrices) {
    if (m.n_layers != layers || m.n_heads != heads || m.values.size() != layers * heads)
      throw UsageError("aggregate: matrix shape mismatch");
    for (std::size_t c = 0; c < acc.size(); ++c) acc[c].add(m.values[c]);
  }
  HeatmapGrid grid;
  grid.split = split;
  grid.count = matrices.size();
  grid.mean = HeadMatrix(layers, heads);
  for (std::size_t c = 0; c < acc.size(); ++c)
    grid.mean.values[c] = acc[c].value() / static_cast<double>(matrices.size());
  return grid;
}

double uniform_baseline(double mean_sentence_length) {
  if (!(mean_sentence_length > 0.0)) throw UsageError("mean sentence length must be > 0");
  return 1.0 / mean_sentence_length;
}

std::vector<FlaggedHead> flag_heads(const HeatmapGrid& grid, double mean_sentence_length,
                                    const Thresholds& thresholds) {
  const double baseline = uniform_baseline(mean_sentence_length);
  std::vector<FlaggedHead> out;
  for (std::size_t l = 0; l < grid.mean.n_layers; ++l) {
    for (std::size_t h = 0; h < grid.mean.n_heads; ++h) {
      const double v = grid.mean.at(l, h);
      if (v >= thresholds.strong * baseline) {
        out.push_back({l, h, v, Tier::Strong});
      } else if (v >= thresholds.salient * baseline) {
        out.push_back({l, h, v, Tier::Salient});
      }
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const FlaggedHead& a, const FlaggedHead& b) { return a.value > b.value; });
  return out;
}

SplitResult split_and_aggregate(std::span<const MemberWeights> members) {
  SplitResult result;
  for (const Split split : kAllSplits) {
    std::vector<HeadMatrix> selected;
    for (const auto& m : members) {
      bool take = false;
      switch (split) {
        case Split::All:
          take = true;
          break;
        case Split::MasculineCue:
          take = m.cue_gender == Gender::Masculine;
          break;
        case Split::FeminineCue:
          take = m.cue_gender == Gender::Feminine;
          break;
        case Split::ProStereo:
          take = m.pro;
          break;
        case Split::AntiStereo:
          take = !m.pro;
          break;
      }
      if (take) selected.push_back(m.weights);
    }
    if (selected.empty()) {
      result.omitted.push_back(split);
    } else {
      result.grids.push_back(aggregate(selected, split));
    }
  }
  return result;
}

MarkerScheme detect_marker_scheme(std::span<const std::string> subwords) {
  std::size_t sp = 0, bpe = 0, bl = 0;
  for (const auto& s : subwords) {
    if (s.find(kSentencePieceMark) != std::string::npos) ++sp;
    if (ends_with(s, "@@")) ++bpe;
    if (starts_with(s, kByteLevelMark)) ++bl;
  }
  if (sp == 0 && bpe == 0 && bl == 0) return MarkerScheme::None;
  if (sp >= bpe && sp >= bl) return MarkerScheme::SentencePiece;
  if (bpe >= bl) return MarkerScheme::Bpe;
  return MarkerScheme::ByteLevel;
}

bool is_special_token(std::string_view s) {
  if (s.size() >= 3 && s.front() == '<' && s.back() == '>') return true;
  if (s.size() >= 5 && starts_with(s, "__") && ends_with(s, "__")) return true;
  const std::size_t us = s.find('_');
  if (us != std::string_view::npos && s.find('_', us + 1) == std::string_view::npos) {
    const auto lang = s.substr(0, us), region = s.substr(us + 1);
    // it_IT, en_XX
    if (lang.size() == 2 && is_lower_ascii(lang) && region.size() == 2 && is_upper_ascii(region))
      return true;
    // ita_Latn
    if (lang.size() == 3 && is_lower_ascii(lang) && region.size() == 4 &&
        is_upper_ascii(region.substr(0, 1)) && is_lower_ascii(region.substr(1)))
      return true;
  }
  return false;
}

std::vector<Span> map_words_to_subwords(std::span<const std::string> words,
                                        std::span<const std::string> subwords,
                                        MarkerScheme scheme) {
  std::vector<std::string> targets;
  targets.reserve(words.size());
  for (const auto& w : words) targets.push_back(text::nfc(w));

  std::vector<Span> spans(words.size());
  std::size_t w = 0, offset = 0;
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::size_t pending = kNone;  // first marker-only piece before a word
  for (std::size_t i = 0; i < subwords.size(); ++i) {
    if (is_special_token(subwords[i])) {
      if (offset != 0) throw MappingFailure("special token inside word " + std::to_string(w));
      continue;
    }
    const std::string piece = strip_markers(subwords[i], scheme);
    if (piece.empty()) {
      if (offset == 0 && pending == kNone) pending = i;
      continue;
    }
    if (w >= targets.size())
      throw MappingFailure("subword '" + subwords[i] + "' past the last word");
    const std::string& word = targets[w];
    if (word.compare(offset, piece.size(), piece) != 0)
      throw MappingFailure("subword '" + subwords[i] + "' does not continue word '" + word + "'");
    if (offset == 0) {
      spans[w].begin = pending == kNone ? i : pending;
      pending = kNone;
    }
    offset += piece.size();
    spans[w].end = i + 1;
    if (offset == word.size()) {
      ++w;
      offset = 0;
    }
  }
  if (w != targets.size())
    throw MappingFailure("subwords end before word " + std::to_string(w) + " is complete");
  return spans;
}

Span map_word_to_subwords(std::size_t word_index, std::span<const std::string> words,
                          std::span<const std::string> subwords, MarkerScheme scheme) {
  if (word_index >= words.size()) throw UsageError("word index out of range");
  return map_words_to_subwords(words, subwords, scheme)[word_index];
}

}  // namespace mpa::attn
