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


// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit when any
// criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>

#include <fmt/format.h>

#include "mpa/aligner.hpp"
#include "mpa/attn.hpp"
#include "mpa/corpus.hpp"
#include "mpa/io.hpp"
#include "mpa/metrics.hpp"
#include "mpa/morph_it.hpp"
#include "test_support.hpp"

namespace {

namespace fs = std::filesystem;
using namespace mpa;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Collects failure notes for one criterion.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

// ---------------------------------------------------------------------------

void pairs(Check& c) {
  const auto t0 = Clock::now();
  const auto pro = testing::load_set(testing::data("winomt/en_pro.txt"));
  const auto anti = testing::load_set(testing::data("winomt/en_anti.txt"));
  const auto r = corpus::build_minimal_pairs(pro, anti);
  const double secs = seconds_since(t0);
  c.expect(r.pairs.size() == 1584, fmt::format("{} pairs, want 1584", r.pairs.size()));
  c.expect(r.unmatched.empty(), fmt::format("{} unmatched, want 0", r.unmatched.size()));
  c.expect(secs < 1.0, fmt::format("took {:.3f} s, limit 1 s", secs));
}

void aligner(Check& c) {
  const auto corpus = testing::dictionary_corpus(2026);
  align::Config config;
  config.iterations = 5;
  const auto t0 = Clock::now();
  const auto model = align::train(corpus.pairs, config);
  const double recovery = testing::link_recovery(model, corpus);
  const double secs = seconds_since(t0);
  c.expect(recovery >= 0.95, fmt::format("link recovery {:.4f} < 0.95", recovery));
  const auto& ll = model.log_likelihood();
  c.expect(ll.size() == 6, fmt::format("{} log-likelihood values, want 6", ll.size()));
  for (std::size_t i = 1; i < ll.size(); ++i)
    c.expect(ll[i] >= ll[i - 1] - 1e-9 * std::abs(ll[i - 1]),
             fmt::format("log-likelihood fell at iteration {}: {} -> {}", i, ll[i - 1], ll[i]));
  c.expect(secs < 5.0, fmt::format("took {:.3f} s, limit 5 s", secs));
}

void morphology(Check& c) {
  using morph::Evidence;
  using morph::GenderVerdict;
  const auto lex =
      morph::GenderLexicon::parse(io::read_text_file(testing::data("lexicon/it.lex")));
  std::size_t consistent = 0;
  for (const auto& [form, tag] : lex.entries()) {
    bool ok;
    if (tag == morph::LexiconTag::DeterminerDecides) {
      const std::vector<std::string> m = {"il", form}, f = {"la", form};
      ok = morph::classify_gender(m, 1, lex).gender == Gender::Masculine &&
           morph::classify_gender(f, 1, lex).gender == Gender::Feminine;
    } else {
      const std::vector<std::string> alone = {form};
      const Gender want =
          tag == morph::LexiconTag::Masculine ? Gender::Masculine : Gender::Feminine;
      ok = morph::classify_gender(alone, 0, lex) == GenderVerdict{want, Evidence::Lexicon};
    }
    if (ok) ++consistent;
    c.expect(ok, "lexicon entry '" + form + "' misclassified");
  }
  c.expect(lex.size() > 0 && consistent == lex.size(),
           fmt::format("self-consistency {}/{}", consistent, lex.size()));

  struct Example {
    std::vector<std::string> tokens;
    GenderVerdict want;
  };
  const std::vector<Example> examples = {
      {{"il", "bibliotecario"}, {Gender::Masculine, Evidence::Lexicon}},
      {{"la", "bibliotecaria"}, {Gender::Feminine, Evidence::Lexicon}},
      {{"la", "governante"}, {Gender::Feminine, Evidence::Determiner}},
      {{"l'", "analista"}, {Gender::Unknown, Evidence::None}},
  };
  for (const auto& e : examples) {
    const auto got = morph::classify_gender(e.tokens, 1, lex);
    c.expect(got == e.want, fmt::format("{} {} -> {}/{}", e.tokens[0], e.tokens[1],
                                        to_string(got.gender), morph::to_string(got.evidence)));
  }
}

void metrics_properties(Check& c) {
  using metrics::InstanceOutcome;
  using metrics::PairOutcome;
  toy::SplitMix rng(497);
  const Gender labels[3] = {Gender::Masculine, Gender::Feminine, Gender::Unknown};
  auto make = [](Gender gold, Gender got) {
    InstanceOutcome o;
    o.gold = gold;
    o.extracted.gender = got;
    o.correct = got != Gender::Unknown && got == gold;
    return o;
  };
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 60);
    std::vector<InstanceOutcome> pro, anti;
    std::vector<PairOutcome> po;
    for (std::size_t i = 0; i < n; ++i) {
      const bool fem = rng.uniform() < 0.5;
      const Gender s = fem ? Gender::Feminine : Gender::Masculine;
      const Gender a = fem ? Gender::Masculine : Gender::Feminine;
      pro.push_back(make(s, labels[static_cast<std::size_t>(rng.uniform() * 3)]));
      anti.push_back(make(a, labels[static_cast<std::size_t>(rng.uniform() * 3)]));
      PairOutcome p;
      p.pair_id = i;
      p.stereotype = s;
      p.pro_correct = pro.back().correct;
      p.anti_correct = anti.back().correct;
      po.push_back(p);
    }
    const auto m = metrics::mpa(po);
    const double pro_acc = metrics::gender_accuracy(pro).overall.percent();
    const double anti_acc = metrics::gender_accuracy(anti).overall.percent();
    if (m.mpa > pro_acc || m.mpa > anti_acc) {
      c.expect(false, fmt::format("trial {}: mpa {} above side accuracy {} / {}", trial, m.mpa,
                                  pro_acc, anti_acc));
    }
    if (m.n_accurate > 0 && std::abs(m.pro_f + m.pro_m - 100.0) > 1e-9)
      c.expect(false, fmt::format("trial {}: pro_f + pro_m = {}", trial, m.pro_f + m.pro_m));

    const std::string before = metrics::mpa_records(m, true);
    for (std::size_t i = po.size(); i > 1; --i)
      std::swap(po[i - 1], po[static_cast<std::size_t>(rng.uniform() * i)]);
    if (metrics::mpa_records(metrics::mpa(po), true) != before)
      c.expect(false, fmt::format("trial {}: mpa changed under permutation", trial));
  }

  std::vector<PairOutcome> three(3);
  three[0].pro_correct = three[0].anti_correct = true;
  three[1].pro_correct = true;
  const auto m = metrics::mpa(three);
  const std::string shown = metrics::format_percent(m.n_accurate, m.n_pairs);
  c.expect(shown == "33.33", "3-pair example gave " + shown);
}

attn::Tensor4 random_tensor(toy::SplitMix& rng, std::array<std::size_t, 4> shape) {
  attn::Tensor4 t;
  t.shape = shape;
  t.data.resize(shape[0] * shape[1] * shape[2] * shape[3]);
  for (std::size_t row = 0; row < shape[0] * shape[1] * shape[2]; ++row) {
    double sum = 0.0;
    for (std::size_t k = 0; k < shape[3]; ++k) sum += t.data[row * shape[3] + k] = static_cast<float>(rng.uniform() + 1e-3);
    for (std::size_t k = 0; k < shape[3]; ++k)
      t.data[row * shape[3] + k] = static_cast<float>(t.data[row * shape[3] + k] / sum);
  }
  return t;
}

void attention(Check& c) {
  toy::SplitMix rng(498);
  auto span = [&](std::size_t n) {
    const auto b = static_cast<std::size_t>(rng.uniform() * n);
    return attn::Span{b, b + 1 + static_cast<std::size_t>(rng.uniform() * (n - b))};
  };
  double worst_weight = 0.0, worst_mean = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t L = 1 + trial % 4, H = 1 + trial % 5;
    const std::size_t Q = 2 + trial % 11, K = 2 + (trial * 5) % 17;
    const auto t = random_tensor(rng, {L, H, Q, K});
    const auto qs = span(Q), ks = span(K);
    const auto w = attn::cue_target_weight(t, qs, ks);
    for (std::size_t l = 0; l < L; ++l)
      for (std::size_t h = 0; h < H; ++h) {
        double total = 0.0;
        std::size_t cells = 0;
        for (std::size_t q = qs.begin; q < qs.end; ++q)
          for (std::size_t k = ks.begin; k < ks.end; ++k) {
            total += t.data[((l * H + h) * Q + q) * K + k];
            ++cells;
          }
        worst_weight = std::max(worst_weight, std::abs(w.at(l, h) - total / cells));
      }
  }
  // aggregate over 100 random matrices against a two-pass mean.
  std::vector<attn::HeadMatrix> ms;
  for (int i = 0; i < 100; ++i) {
    attn::HeadMatrix m(6, 8);
    for (auto& v : m.values) v = rng.uniform() * (rng.uniform() < 0.1 ? 1.0 : 1e-4);
    ms.push_back(m);
  }
  const auto g = attn::aggregate(ms, attn::Split::All);
  for (std::size_t cell = 0; cell < 48; ++cell) {
    double sum = 0.0;
    for (const auto& m : ms) sum += m.values[cell];
    const double first = sum / 100.0;
    double resid = 0.0;
    for (const auto& m : ms) resid += m.values[cell] - first;
    worst_mean = std::max(worst_mean, std::abs(g.mean.values[cell] - (first + resid / 100.0)));
  }
  c.expect(worst_weight <= 1e-12, fmt::format("cue_target_weight off by {:.3g}", worst_weight));
  c.expect(worst_mean <= 1e-12, fmt::format("aggregate off by {:.3g}", worst_mean));

  testing::TempDir dir;
  testing::write_mini_dump(dir.path());
  toy::corrupt_row(dir.path(), 1);
  const auto dump = attn::Dump::open(dir.path());
  const std::string id = dump.sentences()[1].sentence_id;
  bool rejected = false;
  try {
    dump.load(1, attn::Kind::SelfAttention);
  } catch (const ValidationError& e) {
    rejected = std::string(e.what()).find(id) != std::string::npos;
  }
  c.expect(rejected, "corrupted dump row not rejected with its sentence_id");

  const auto pro = testing::load_set(testing::data("winomt/en_pro.txt"));
  const auto anti = testing::load_set(testing::data("winomt/en_anti.txt"));
  const double len = corpus::mean_pair_length(corpus::build_minimal_pairs(pro, anti).pairs);
  const double baseline = attn::uniform_baseline(len);
  c.expect(std::abs(baseline - 1.0 / 13.0) <= 0.005,
           fmt::format("baseline {:.4f} not within 0.005 of 1/13", baseline));
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file())
      out[fs::relative(e.path(), root).generic_string()] = io::read_text_file(e.path());
  return out;
}

void determinism(Check& c) {
  testing::TempDir dir;
  const auto pro = testing::load_set(testing::data("winomt/en_pro.txt"));
  auto all = pro;
  const auto anti = testing::load_set(testing::data("winomt/en_anti.txt"));
  all.insert(all.end(), anti.begin(), anti.end());
  toy::write_dump(dir / "dump", all, toy::stereotypes(pro), {});

  auto report = [&](const std::string& out, int threads) {
    const std::string cmd = fmt::format(
        "'{}' --out '{}' --threads {} report --pro '{}' --anti '{}' --dump '{}' --lexicon '{}' "
        ">/dev/null",
        MPA_EVAL_BINARY, (dir / out).string(), threads,
        testing::data("winomt/en_pro.txt").string(), testing::data("winomt/en_anti.txt").string(),
        (dir / "dump").string(), testing::data("lexicon/it.lex").string());
    const int status = std::system(cmd.c_str());
    c.expect(WIFEXITED(status) && WEXITSTATUS(status) == 0,
             fmt::format("report with {} threads exited with status {}", threads, status));
  };
  report("a", 1);
  report("b", 1);
  report("c", 8);
  if (!c.failures.empty()) return;
  const auto a = tree(dir / "a");
  c.expect(a.count("report.txt") == 1, "report.txt missing");
  c.expect(a == tree(dir / "b"), "two runs differ");
  c.expect(a == tree(dir / "c"), "threads 1 and 8 differ");
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Check&)>>> criteria = {
      {"pair construction: 1584 pairs, 0 unmatched, < 1 s", pairs},
      {"aligner: >= 95% link recovery, monotone likelihood, < 5 s", aligner},
      {"morphology: lexicon self-consistency and the four examples", morphology},
      {"metrics: MPA bounds, Pro-F + Pro-M, permutation invariance, 33.33", metrics_properties},
      {"attention: oracles within 1e-12, corrupt dump rejected, baseline ~ 1/13", attention},
      {"determinism: report byte-identical across runs and thread counts", determinism},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Check c;
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    fmt::print("{} {}\n", c.failures.empty() ? "PASS" : "FAIL", name);
    for (std::size_t i = 0; i < c.failures.size() && i < 10; ++i)
      fmt::print("     {}\n", c.failures[i]);
    if (!c.failures.empty()) ++failed;
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
