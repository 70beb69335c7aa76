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


// Serial reference kernels against their OpenMP versions:
//   mpa_bench --benchmark_filter=EStep
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "mpa/aligner.hpp"
#include "mpa/attn.hpp"
#include "test_support.hpp"

namespace {

using namespace mpa;

const testing::DictionaryCorpus& dictionary() {
  static const auto c = testing::dictionary_corpus(1, 4000, 2000);
  return c;
}

void BM_EStep(benchmark::State& state, align::Execution exec) {
  align::Config config;
  config.iterations = 1;
  for (auto _ : state) {
    auto model = align::train(dictionary().pairs, config, exec);
    benchmark::DoNotOptimize(model.log_likelihood().back());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(dictionary().pairs.size()));
}
BENCHMARK_CAPTURE(BM_EStep, serial, align::Execution::Serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_EStep, parallel, align::Execution::Parallel)->Unit(benchmark::kMillisecond);

struct ExtractFixture {
  testing::TempDir dir;
  attn::Dump dump;
  std::vector<attn::ExtractJob> jobs;

  ExtractFixture() {
    const auto pro = testing::load_set(testing::data("winomt/en_pro.txt"));
    toy::write_dump(dir.path(), pro, toy::stereotypes(pro), {});
    dump = attn::Dump::open(dir.path());
    for (std::size_t r = 0; r < dump.sentences().size(); ++r) {
      const auto& spans = dump.sentences()[r].src_word_spans;
      jobs.push_back({r, spans[1], spans.back()});
    }
  }
};

const ExtractFixture& extract_fixture() {
  static const ExtractFixture f;
  return f;
}

void BM_Extract(benchmark::State& state, bool parallel) {
  const auto& f = extract_fixture();
  for (auto _ : state) {
    auto out = parallel ? attn::extract_parallel(f.dump, f.jobs, attn::Kind::SelfAttention)
                        : attn::extract_serial(f.dump, f.jobs, attn::Kind::SelfAttention);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.jobs.size()));
}
BENCHMARK_CAPTURE(BM_Extract, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Extract, parallel, true)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
