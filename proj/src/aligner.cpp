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

#include "mpa/aligner.hpp"

#include <algorithm>
#include <cmath>

#include "mpa/errors.hpp"
#include "mpa/text.hpp"

namespace mpa::align {
namespace {

constexpr std::uint32_t kNullId = 0;

double unnormalized_prior(std::size_t i, std::size_t j, std::size_t m, std::size_t n,
                          double lambda) {
  const double src = static_cast<double>(i + 1) / static_cast<double>(m);
  const double tgt = static_cast<double>(j + 1) / static_cast<double>(n);
  return std::exp(-lambda * std::fabs(src - tgt));
}

void mstep(TTable& table, std::span<const double> counts) {
  for (std::size_t e = 0; e < table.rows(); ++e) {
    const std::size_t lo = table.row_begin[e], hi = table.row_begin[e + 1];
    double total = 0.0;
    for (std::size_t s = lo; s < hi; ++s) total += counts[s];
    if (total > 0.0) {
      for (std::size_t s = lo; s < hi; ++s) table.prob[s] = counts[s] / total;
    } else {
      for (std::size_t s = lo; s < hi; ++s) table.prob[s] = 1.0 / static_cast<double>(hi - lo);
    }
  }
}

}  // namespace

double diagonal_prior(std::size_t i, std::size_t j, std::size_t m, std::size_t n, double lambda,
                      double p_null) {
  double z = 0.0;
  for (std::size_t k = 0; k < m; ++k) z += unnormalized_prior(k, j, m, n, lambda);
  return (1.0 - p_null) * unnormalized_prior(i, j, m, n, lambda) / z;
}

void diagonal_priors(std::size_t j, std::size_t m, std::size_t n, double lambda, double p_null,
                     std::span<double> out) {
  double z = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    out[i] = unnormalized_prior(i, j, m, n, lambda);
    z += out[i];
  }
  const double scale = (1.0 - p_null) / z;
  for (std::size_t i = 0; i < m; ++i) out[i] *= scale;
}

std::uint32_t Vocab::intern(std::string_view word) {
  auto [it, inserted] = ids_.try_emplace(std::string(word), static_cast<std::uint32_t>(words_.size()));
  if (inserted) words_.emplace_back(word);
  return it->second;
}

std::optional<std::uint32_t> Vocab::find(std::string_view word) const {
  const auto it = ids_.find(std::string(word));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::size_t TTable::slot(std::uint32_t e, std::uint32_t f) const {
  if (e >= rows()) return std::string::npos;
  const auto lo = target.begin() + static_cast<std::ptrdiff_t>(row_begin[e]);
  const auto hi = target.begin() + static_cast<std::ptrdiff_t>(row_begin[e + 1]);
  const auto it = std::lower_bound(lo, hi, f);
  if (it == hi || *it != f) return std::string::npos;
  return static_cast<std::size_t>(it - target.begin());
}

double Model::prob(std::string_view target, std::string_view source) const {
  const auto e = source_vocab_.find(source);
  const auto f = target_vocab_.find(target);
  if (!e || !f || *e == kNullId) return 0.0;
  const std::size_t s = table_.slot(*e, *f);
  return s == std::string::npos ? 0.0 : table_.prob[s];
}

double Model::null_prob(std::string_view target) const {
  const auto f = target_vocab_.find(target);
  if (!f) return 0.0;
  const std::size_t s = table_.slot(kNullId, *f);
  return s == std::string::npos ? 0.0 : table_.prob[s];
}

Model train(std::span<const SentencePair> corpus, const Config& config, Execution exec) {
  if (corpus.empty()) throw UsageError("aligner: empty training corpus");
  if (config.iterations < 1) throw UsageError("aligner: iterations must be >= 1");
  if (!(config.lambda > 0.0)) throw UsageError("aligner: lambda must be > 0");
  if (!(config.p_null > 0.0 && config.p_null < 1.0))
    throw UsageError("aligner: p_null must lie in (0, 1)");

  Model model;
  model.config_ = config;
  model.source_vocab_.intern("");  // NULL; real words are never empty

  // Integerize and collect co-occurrences.
  std::vector<std::vector<std::uint32_t>> src_ids(corpus.size()), tgt_ids(corpus.size());
  std::vector<std::vector<std::uint32_t>> cooc(1);
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const auto& pair = corpus[k];
    if (pair.source.empty() || pair.target.empty())
      throw UsageError("aligner: sentence pair " + std::to_string(k) + " has an empty side");
    for (const auto& w : pair.source) {
      if (w.empty()) throw UsageError("aligner: empty token in sentence " + std::to_string(k));
      src_ids[k].push_back(model.source_vocab_.intern(w));
    }
    for (const auto& w : pair.target) {
      if (w.empty()) throw UsageError("aligner: empty token in sentence " + std::to_string(k));
      tgt_ids[k].push_back(model.target_vocab_.intern(w));
    }
    cooc.resize(model.source_vocab_.size());
    for (const auto f : tgt_ids[k]) {
      cooc[kNullId].push_back(f);
      for (const auto e : src_ids[k]) cooc[e].push_back(f);
    }
  }

  TTable& table = model.table_;
  table.row_begin.assign(cooc.size() + 1, 0);
  for (std::size_t e = 0; e < cooc.size(); ++e) {
    auto& row = cooc[e];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    table.row_begin[e + 1] = table.row_begin[e] + row.size();
  }
  table.target.reserve(table.row_begin.back());
  table.prob.reserve(table.row_begin.back());
  for (const auto& row : cooc) {
    for (const auto f : row) {
      table.target.push_back(f);
      table.prob.push_back(1.0 / static_cast<double>(row.size()));
    }
  }
  cooc.clear();

  IndexedCorpus indexed;
  indexed.sents.reserve(corpus.size());
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    IndexedCorpus::Sent s{src_ids[k].size(), tgt_ids[k].size(), indexed.slots.size()};
    for (const auto f : tgt_ids[k]) {
      indexed.slots.push_back(table.slot(kNullId, f));
      for (const auto e : src_ids[k]) indexed.slots.push_back(table.slot(e, f));
    }
    indexed.sents.push_back(s);
  }
  indexed.total_cells = indexed.slots.size();

  std::vector<double> counts(table.prob.size());
  auto run_estep = [&]() {
    std::fill(counts.begin(), counts.end(), 0.0);
    const double ll = exec == Execution::Serial ? estep_serial(indexed, table, config, counts)
                                                : estep_parallel(indexed, table, config, counts);
    if (!std::isfinite(ll))
      throw NumericError("aligner: non-finite corpus log-likelihood after " +
                         std::to_string(model.log_likelihood_.size()) + " iterations");
    model.log_likelihood_.push_back(ll);
  };

  for (int it = 0; it < config.iterations; ++it) {
    run_estep();
    mstep(table, counts);
  }
  run_estep();
  model.trained_ = true;
  return model;
}

Alignment viterbi_align(const Model& model, const Sentence& source, const Sentence& target) {
  if (!model.trained()) throw UsageError("aligner: model is not trained");
  if (source.empty() || target.empty()) throw UsageError("aligner: empty sentence");

  const std::size_t m = source.size(), n = target.size();
  const Config& cfg = model.config();
  std::vector<std::optional<std::uint32_t>> src_ids(m);
  for (std::size_t i = 0; i < m; ++i) src_ids[i] = model.source_vocab_.find(source[i]);

  Alignment out;
  out.source_len = m;
  out.target_len = n;
  out.links.reserve(n);
  std::vector<double> prior(m);
  for (std::size_t j = 0; j < n; ++j) {
    diagonal_priors(j, m, n, cfg.lambda, cfg.p_null, prior);
    const auto f = model.target_vocab_.find(target[j]);

    auto lexical = [&](std::size_t i) {
      if (!src_ids[i] || *src_ids[i] == kNullId) return 0.0;
      const std::size_t s = model.table_.slot(*src_ids[i], *f);
      return s == std::string::npos ? 0.0 : model.table_.prob[s];
    };

    std::size_t best = 0;
    double best_score = -1.0;
    double null_score = 0.0;
    if (f) {
      for (std::size_t i = 0; i < m; ++i) {
        const double score = prior[i] * lexical(i);
        if (score > best_score) {
          best_score = score;
          best = i;
        }
      }
      null_score = cfg.p_null * model.null_prob(target[j]);
    }
    if (!f || (best_score <= 0.0 && null_score <= 0.0)) {
      // No lexical evidence: the positional prior alone decides.
      best_score = -1.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (prior[i] > best_score) {
          best_score = prior[i];
          best = i;
        }
      }
      null_score = f ? 0.0 : cfg.p_null;
    }
    if (null_score > best_score) {
      out.links.push_back({j, std::nullopt});
    } else {
      out.links.push_back({j, best});
    }
  }
  return out;
}

std::vector<std::size_t> project_index(const Alignment& alignment, std::size_t source_index) {
  std::vector<std::size_t> out;
  for (const auto& link : alignment.links)
    if (link.source && *link.source == source_index) out.push_back(link.target);
  std::sort(out.begin(), out.end());
  return out;
}

std::string to_pharaoh(const Alignment& alignment) {
  std::string out;
  for (const auto& link : alignment.links) {
    if (!link.source) continue;
    if (!out.empty()) out += ' ';
    out += std::to_string(link.target);
    out += '-';
    out += std::to_string(*link.source);
  }
  return out;
}

SentencePair parse_parallel_line(std::string_view line) {
  const std::size_t sep = line.find("|||");
  if (sep == std::string_view::npos) throw ParseError("missing '|||' separator");
  SentencePair pair;
  pair.source = text::split_words(line.substr(0, sep));
  pair.target = text::split_words(line.substr(sep + 3));
  if (pair.source.empty() || pair.target.empty()) throw ParseError("empty side in parallel line");
  return pair;
}

}  // namespace mpa::align
