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

// E-step kernels. The serial kernel is the reference; the OpenMP kernel
// computes per-sentence posteriors concurrently and then folds them into the
// shared counts in the same order the serial kernel uses.

#include <cmath>
#include <vector>

#include "mpa/aligner.hpp"

namespace mpa::align {
namespace {

// Posteriors for every cell of one sentence (row-major [j][NULL, 0..m-1])
// and log Z for every target position.
void sentence_posteriors(const IndexedCorpus::Sent& s, const std::size_t* slots,
                         const TTable& table, const Config& config, double* post,
                         double* log_z, std::vector<double>& prior) {
  const std::size_t width = s.m + 1;
  prior.resize(s.m);
  for (std::size_t j = 0; j < s.n; ++j) {
    diagonal_priors(j, s.m, s.n, config.lambda, config.p_null, prior);
    const std::size_t* row_slots = slots + j * width;
    double* row_post = post + j * width;
    double z = config.p_null * table.prob[row_slots[0]];
    row_post[0] = z;
    for (std::size_t i = 0; i < s.m; ++i) {
      const double v = prior[i] * table.prob[row_slots[i + 1]];
      row_post[i + 1] = v;
      z += v;
    }
    for (std::size_t c = 0; c < width; ++c) row_post[c] /= z;
    log_z[j] = std::log(z);
  }
}

}  // namespace

double estep_serial(const IndexedCorpus& corpus, const TTable& table, const Config& config,
                    std::span<double> counts) {
  double log_likelihood = 0.0;
  std::vector<double> post, log_z, prior;
  for (const auto& s : corpus.sents) {
    const std::size_t width = s.m + 1;
    post.resize(s.n * width);
    log_z.resize(s.n);
    const std::size_t* slots = corpus.slots.data() + s.offset;
    sentence_posteriors(s, slots, table, config, post.data(), log_z.data(), prior);
    for (std::size_t j = 0; j < s.n; ++j) {
      log_likelihood += log_z[j];
      for (std::size_t c = 0; c < width; ++c) counts[slots[j * width + c]] += post[j * width + c];
    }
  }
  return log_likelihood;
}

double estep_parallel(const IndexedCorpus& corpus, const TTable& table, const Config& config,
                      std::span<double> counts) {
  const std::size_t n_sents = corpus.sents.size();
  // Target-position offsets so each sentence owns a slice of `log_z`.
  std::vector<std::size_t> z_offset(n_sents + 1, 0);
  for (std::size_t k = 0; k < n_sents; ++k) z_offset[k + 1] = z_offset[k] + corpus.sents[k].n;

  std::vector<double> post(corpus.total_cells);
  std::vector<double> log_z(z_offset[n_sents]);

#pragma omp parallel
  {
    std::vector<double> prior;
#pragma omp for schedule(static)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n_sents); ++k) {
      const auto& s = corpus.sents[k];
      sentence_posteriors(s, corpus.slots.data() + s.offset, table, config,
                          post.data() + s.offset, log_z.data() + z_offset[k], prior);
    }
  }

  double log_likelihood = 0.0;
  for (std::size_t k = 0; k < n_sents; ++k) {
    const auto& s = corpus.sents[k];
    const std::size_t width = s.m + 1;
    const std::size_t* slots = corpus.slots.data() + s.offset;
    const double* p = post.data() + s.offset;
    for (std::size_t j = 0; j < s.n; ++j) {
      log_likelihood += log_z[z_offset[k] + j];
      for (std::size_t c = 0; c < width; ++c) counts[slots[j * width + c]] += p[j * width + c];
    }
  }
  return log_likelihood;
}

}  // namespace mpa::align
