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

#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>
#include <map>
#include <set>

#include "mpa/aligner.hpp"
#include "test_support.hpp"

namespace mpa::align {
namespace {

using Corpus = std::vector<SentencePair>;

// Straightforward EM over string-keyed maps, written independently of the
// flat-table implementation.
struct OracleEm {
  std::map<std::pair<std::string, std::string>, double> t;  // (e, f); e = "" is NULL
  std::vector<double> log_likelihood;

  static double delta(std::size_t i, std::size_t j, std::size_t m, std::size_t n, double lambda,
                      double p0) {
    double z = 0.0;
    for (std::size_t k = 1; k <= m; ++k)
      z += std::exp(-lambda * std::fabs(double(k) / double(m) - double(j + 1) / double(n)));
    return (1.0 - p0) *
           std::exp(-lambda * std::fabs(double(i + 1) / double(m) - double(j + 1) / double(n))) / z;
  }

  OracleEm(const Corpus& corpus, const Config& cfg) {
    std::map<std::string, std::set<std::string>> cooc;
    for (const auto& p : corpus)
      for (const auto& f : p.target) {
        cooc[""].insert(f);
        for (const auto& e : p.source) cooc[e].insert(f);
      }
    for (const auto& [e, fs] : cooc)
      for (const auto& f : fs) t[{e, f}] = 1.0 / double(fs.size());

    for (int it = 0; it <= cfg.iterations; ++it) {
      std::map<std::pair<std::string, std::string>, double> counts;
      double ll = 0.0;
      for (const auto& p : corpus) {
        const std::size_t m = p.source.size(), n = p.target.size();
        for (std::size_t j = 0; j < n; ++j) {
          const auto& f = p.target[j];
          std::vector<double> score(m + 1);
          score[0] = cfg.p_null * t[{"", f}];
          for (std::size_t i = 0; i < m; ++i)
            score[i + 1] = delta(i, j, m, n, cfg.lambda, cfg.p_null) * t[{p.source[i], f}];
          double z = 0.0;
          for (double s : score) z += s;
          ll += std::log(z);
          counts[{"", f}] += score[0] / z;
          for (std::size_t i = 0; i < m; ++i) counts[{p.source[i], f}] += score[i + 1] / z;
        }
      }
      log_likelihood.push_back(ll);
      if (it == cfg.iterations) break;
      std::map<std::string, double> totals;
      for (const auto& [k, c] : counts) totals[k.first] += c;
      for (auto& [k, v] : t) v = counts[k] / totals[k.first];
    }
  }
};

// Frozen from OracleEm on the two-pair corpus, default config.
constexpr double kTwoPairTxa = 0.99999701483256254;
constexpr double kTwoPairTyb = 0.99995684792876216;
constexpr double kTwoPairFinalLl = -0.65805486788671053;

Corpus two_pair_corpus() {
  return {{{"a", "b"}, {"x", "y"}}, {{"a", "c"}, {"x", "z"}}};
}

TEST(DiagonalPrior, SumsToNonNullMass) {
  for (std::size_t m : {1u, 2u, 5u, 13u})
    for (std::size_t n : {1u, 3u, 13u})
      for (std::size_t j = 0; j < n; ++j) {
        double sum = 0.0;
        std::vector<double> batch(m);
        diagonal_priors(j, m, n, 4.0, 0.08, batch);
        for (std::size_t i = 0; i < m; ++i) {
          const double d = diagonal_prior(i, j, m, n, 4.0, 0.08);
          EXPECT_NEAR(d, batch[i], 1e-15);
          sum += d;
        }
        EXPECT_NEAR(sum, 0.92, 1e-12);
      }
}

TEST(DiagonalPrior, PeaksOnTheDiagonal) {
  // m = n: position i is closest to j = i.
  for (std::size_t j = 0; j < 6; ++j) {
    std::vector<double> d(6);
    diagonal_priors(j, 6, 6, 4.0, 0.08, d);
    EXPECT_EQ(std::max_element(d.begin(), d.end()) - d.begin(), static_cast<long>(j));
  }
}

TEST(Train, SinglePairOneIteration) {
  const Corpus c{{{"a"}, {"x"}}};
  const auto model = train(c, {1, 4.0, 0.08});
  EXPECT_DOUBLE_EQ(model.prob("x", "a"), 1.0);
  EXPECT_DOUBLE_EQ(model.null_prob("x"), 1.0);
}

TEST(Train, TwoPairMatchesOracle) {
  const Corpus c = two_pair_corpus();
  const Config cfg;
  const auto model = train(c, cfg);
  const OracleEm oracle(c, cfg);
  for (const auto& [k, v] : oracle.t) {
    const double got = k.first.empty() ? model.null_prob(k.second) : model.prob(k.second, k.first);
    EXPECT_NEAR(got, v, 1e-12) << k.first << " -> " << k.second;
  }
  ASSERT_EQ(model.log_likelihood().size(), oracle.log_likelihood.size());
  for (std::size_t i = 0; i < oracle.log_likelihood.size(); ++i)
    EXPECT_NEAR(model.log_likelihood()[i], oracle.log_likelihood[i], 1e-12);

  // argmax_f t(f|a) = x
  EXPECT_GT(model.prob("x", "a"), model.prob("y", "a"));
  EXPECT_GT(model.prob("x", "a"), model.prob("z", "a"));
}

TEST(Train, TwoPairFrozenValues) {
  const auto model = train(two_pair_corpus(), Config{});
  EXPECT_NEAR(model.prob("x", "a"), kTwoPairTxa, 1e-12);
  EXPECT_NEAR(model.prob("y", "b"), kTwoPairTyb, 1e-12);
  EXPECT_NEAR(model.log_likelihood().back(), kTwoPairFinalLl, 1e-12);
}

TEST(Train, DictionaryCorpusRecovery) {
  const auto c = testing::dictionary_corpus(42);
  const auto model = train(c.pairs, Config{});
  EXPECT_GE(testing::dictionary_recovery(model, c), 0.95);
  EXPECT_GE(testing::link_recovery(model, c), 0.95);
}

TEST(Train, LogLikelihoodNonDecreasing) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto c = testing::dictionary_corpus(seed, 300, 80);
    const auto model = train(c.pairs, Config{10, 4.0, 0.08});
    const auto& ll = model.log_likelihood();
    ASSERT_EQ(ll.size(), 11u);
    for (std::size_t i = 1; i < ll.size(); ++i)
      EXPECT_GE(ll[i], ll[i - 1] - 1e-9 * std::fabs(ll[i - 1])) << "iteration " << i;
  }
}

TEST(Train, RowsNormalized) {
  const auto c = testing::dictionary_corpus(5, 200, 60);
  const auto model = train(c.pairs, Config{});
  const auto& t = model.table();
  for (std::size_t e = 0; e < t.rows(); ++e) {
    if (t.row_begin[e] == t.row_begin[e + 1]) continue;
    double sum = 0.0;
    for (std::size_t s = t.row_begin[e]; s < t.row_begin[e + 1]; ++s) {
      EXPECT_GE(t.prob[s], 0.0);
      EXPECT_LE(t.prob[s], 1.0);
      sum += t.prob[s];
    }
    EXPECT_NEAR(sum, 1.0, 1e-6);
  }
}

TEST(Train, SerialAndParallelBitwiseEqual) {
  const auto c = testing::dictionary_corpus(9, 400, 100);
  const auto ref = train(c.pairs, Config{}, Execution::Serial);
  for (int threads : {1, 2, 3, 8}) {
    omp_set_num_threads(threads);
    const auto par = train(c.pairs, Config{}, Execution::Parallel);
    EXPECT_EQ(par.table().prob, ref.table().prob) << threads << " threads";
    EXPECT_EQ(par.log_likelihood(), ref.log_likelihood()) << threads << " threads";
  }
}

TEST(Train, Deterministic) {
  const auto c = testing::dictionary_corpus(13, 100, 40);
  EXPECT_EQ(train(c.pairs).table().prob, train(c.pairs).table().prob);
}

TEST(Train, RejectsBadInput) {
  EXPECT_THROW(train({}), UsageError);
  EXPECT_THROW(train(Corpus{{{}, {"x"}}}), UsageError);
  EXPECT_THROW(train(Corpus{{{"a"}, {}}}), UsageError);
  EXPECT_THROW(train(Corpus{{{"a"}, {"x"}}}, Config{0, 4.0, 0.08}), UsageError);
  EXPECT_THROW(train(Corpus{{{"a"}, {"x"}}}, Config{5, 0.0, 0.08}), UsageError);
  EXPECT_THROW(train(Corpus{{{"a"}, {"x"}}}, Config{5, 4.0, 1.0}), UsageError);
}

TEST(Viterbi, IdentityCorpus) {
  Corpus c;
  for (const auto& s : std::vector<Sentence>{{"a", "b", "c"}, {"b", "c", "d"}, {"a", "d"},
                                              {"c", "a", "b"}})
    c.push_back({s, s});
  const auto model = train(c);
  const auto a = viterbi_align(model, {"a", "b", "c"}, {"a", "b", "c"});
  const std::vector<Link> expected{{0, 0}, {1, 1}, {2, 2}};
  EXPECT_EQ(a.links, expected);
  EXPECT_EQ(to_pharaoh(a), "0-0 1-1 2-2");
}

TEST(Viterbi, PalindromicIdentityPairs) {
  Corpus c;
  for (const auto& s : std::vector<Sentence>{{"a", "b", "a"}, {"c", "d", "d", "c"},
                                              {"e", "f", "g", "f", "e"}})
    c.push_back({s, s});
  const auto model = train(c);
  for (const auto& p : c) {
    const auto a = viterbi_align(model, p.source, p.target);
    for (const auto& link : a.links) EXPECT_EQ(link.source, link.target);
  }
}

TEST(Viterbi, UnseenWordsFollowTheDiagonal) {
  const auto model = train(Corpus{{{"a"}, {"x"}}});
  const auto a = viterbi_align(model, {"p", "q"}, {"r", "s"});
  const std::vector<Link> expected{{0, 0}, {1, 1}};
  EXPECT_EQ(a.links, expected);
}

TEST(Viterbi, TieGoesToSmallestSourceIndex) {
  // m = 2, n = 4: target position 2 sits exactly between the two sources.
  const Corpus c{{{"a", "a"}, {"y", "y", "x", "y"}}};
  const auto model = train(c);
  const auto a = viterbi_align(model, c[0].source, c[0].target);
  EXPECT_EQ(a.links[2].source, std::optional<std::size_t>(0));
}

TEST(Viterbi, RequiresTrainedModelAndInput) {
  EXPECT_THROW(viterbi_align(Model{}, {"a"}, {"x"}), UsageError);
  const auto model = train(Corpus{{{"a"}, {"x"}}});
  EXPECT_THROW(viterbi_align(model, {}, {"x"}), UsageError);
  EXPECT_THROW(viterbi_align(model, {"a"}, {}), UsageError);
}

TEST(Viterbi, EveryTargetLinkedOnce) {
  const auto c = testing::dictionary_corpus(21, 100, 40);
  const auto model = train(c.pairs);
  for (const auto& p : c.pairs) {
    const auto a = viterbi_align(model, p.source, p.target);
    ASSERT_EQ(a.links.size(), p.target.size());
    for (std::size_t j = 0; j < a.links.size(); ++j) {
      EXPECT_EQ(a.links[j].target, j);
      if (a.links[j].source) {
        EXPECT_LT(*a.links[j].source, p.source.size());
      }
    }
  }
}

TEST(ProjectIndex, Examples) {
  EXPECT_EQ(project_index({{{0, 1}, {1, 0}}, 2, 2}, 1), (std::vector<std::size_t>{0}));
  EXPECT_TRUE(project_index({{{0, std::nullopt}}, 1, 1}, 0).empty());
  EXPECT_EQ(project_index({{{0, 2}, {1, 2}}, 3, 2}, 2), (std::vector<std::size_t>{0, 1}));
}

TEST(Pharaoh, SkipsNullLinks) {
  const Alignment a{{{0, 1}, {1, std::nullopt}, {2, 0}}, 2, 3};
  EXPECT_EQ(to_pharaoh(a), "0-1 2-0");
}

TEST(ParallelLine, Parses) {
  const auto p = parse_parallel_line("the cook ||| il cuoco");
  EXPECT_EQ(p.source, (Sentence{"the", "cook"}));
  EXPECT_EQ(p.target, (Sentence{"il", "cuoco"}));
  EXPECT_THROW(parse_parallel_line("no separator"), ParseError);
  EXPECT_THROW(parse_parallel_line("a |||  "), ParseError);
}

}  // namespace
}  // namespace mpa::align
