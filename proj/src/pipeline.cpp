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

#include "mpa/pipeline.hpp"

#include <unordered_map>

#include <fmt/format.h>
#include <json.hpp>

namespace mpa::pipeline {
namespace {

using ordered_json = nlohmann::ordered_json;

}  // namespace

AlignedDump align_dump(const std::filesystem::path& dir, const align::Config& config,
                       align::Execution exec) {
  AlignedDump out;
  out.dump = attn::Dump::open(dir);
  out.label = sanitize_label(out.dump.manifest().model_name);

  const auto& records = out.dump.sentences();
  out.source.reserve(records.size());
  out.target.reserve(records.size());
  std::vector<align::SentencePair> corpus;
  for (const auto& r : records) {
    out.source.push_back(text::pretokenize(r.source_text));
    out.target.push_back(text::pretokenize(r.translation_text));
    if (!out.source.back().tokens.empty() && !out.target.back().tokens.empty())
      corpus.push_back({out.source.back().tokens, out.target.back().tokens});
  }
  if (corpus.empty())
    throw ValidationError(fmt::format("{}: no record has both a source and a translation",
                                      dir.string()));

  out.aligner = align::train(corpus, config, exec);

  out.alignments.resize(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& s = out.source[i].tokens;
    const auto& t = out.target[i].tokens;
    if (s.empty() || t.empty()) {
      out.alignments[i].source_len = s.size();
      out.alignments[i].target_len = t.size();
      continue;
    }
    out.alignments[i] = align::viterbi_align(out.aligner, s, t);
  }
  return out;
}

std::string sanitize_label(std::string_view name) {
  std::string out;
  for (const char c : name) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '_';
    out += keep ? c : '_';
  }
  if (out.empty() || out == "." || out == "..") out = "model";
  return out;
}

SetEvaluation evaluate_set(const AlignedDump& model, std::span<const corpus::WinoInstance> set,
                           const morph::GenderLexicon& lexicon) {
  std::vector<metrics::ScoreRecord> records;
  records.reserve(set.size());
  for (const auto& inst : set) {
    metrics::ScoreRecord r;
    r.instance = &inst;
    if (const auto idx = model.dump.find_source(inst.sentence)) {
      // An empty translation is a missing translation as far as scoring goes.
      if (!model.target[*idx].tokens.empty()) {
        r.source = &model.source[*idx];
        r.target = &model.target[*idx];
        r.alignment = &model.alignments[*idx];
      }
    }
    records.push_back(r);
  }

  SetEvaluation ev;
  ev.outcomes = metrics::score_instances(records, lexicon, &ev.diagnostics);
  if (!ev.outcomes.empty()) ev.accuracy = metrics::gender_accuracy(ev.outcomes);
  return ev;
}

std::vector<metrics::PairOutcome> pair_outcomes(std::span<const corpus::MinimalPair> pairs,
                                                const SetEvaluation& pro,
                                                const SetEvaluation& anti) {
  std::unordered_map<std::size_t, const metrics::InstanceOutcome*> pro_by_line, anti_by_line;
  for (const auto& o : pro.outcomes) pro_by_line.emplace(o.line_no, &o);
  for (const auto& o : anti.outcomes) anti_by_line.emplace(o.line_no, &o);

  std::vector<metrics::PairOutcome> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    const auto a = pro_by_line.find(p.pro.instance.line_no);
    const auto b = anti_by_line.find(p.anti.instance.line_no);
    if (a == pro_by_line.end() || b == anti_by_line.end())
      throw InvariantError(fmt::format("pair {} has no scored member", p.pair_id));
    metrics::PairOutcome po;
    po.pair_id = p.pair_id;
    po.stereotype = p.stereotype_gender;
    po.pro_correct = a->second->correct;
    po.anti_correct = b->second->correct;
    po.extraction_failure = a->second->extracted.gender == Gender::Unknown ||
                            b->second->extracted.gender == Gender::Unknown;
    out.push_back(po);
  }
  return out;
}

AttentionResult attention_grids(const AlignedDump& model,
                                std::span<const corpus::MinimalPair> pairs,
                                std::span<const metrics::PairOutcome> outcomes, attn::Kind kind,
                                align::Execution exec) {
  if (pairs.size() != outcomes.size())
    throw InvariantError("attention_grids: pairs and outcomes differ in length");

  AttentionResult result;
  result.kind = kind;

  std::vector<attn::ExtractJob> jobs;
  std::vector<attn::MemberWeights> members;

  auto add = [&](const corpus::PairMember& m, bool pro, std::size_t pair_id) {
    const char* side = pro ? "pro" : "anti";
    auto exclude = [&](std::string_view why) {
      result.excluded.push_back(fmt::format("pair {} {} (line {}): {}", pair_id, side,
                                            m.instance.line_no, why));
    };
    const auto idx = model.dump.find_source(m.instance.sentence);
    if (!idx) return exclude("sentence not in dump");
    const auto& rec = model.dump.sentences()[*idx];
    if (m.instance.entity_index >= rec.src_word_spans.size() ||
        m.cue.cue_index >= rec.src_word_spans.size())
      return exclude("word index outside the span map");
    const attn::Span entity = rec.src_word_spans[m.instance.entity_index];
    const attn::Span cue = rec.src_word_spans[m.cue.cue_index];
    if (entity.empty() || cue.empty())
      return exclude(rec.mapping_error.empty() ? "unmapped word" : rec.mapping_error);

    attn::ExtractJob job{*idx, entity, cue};
    if (kind == attn::Kind::CrossAttention) {
      if (!model.dump.has_cross(*idx)) return exclude("no cross-attention tensor");
      const std::size_t t = metrics::entity_target_token(
          m.instance, model.source[*idx], model.target[*idx], model.alignments[*idx]);
      if (t == static_cast<std::size_t>(-1)) return exclude("empty projection");
      const std::size_t word = model.target[*idx].word_of[t];
      if (word >= rec.tgt_word_spans.size() || rec.tgt_word_spans[word].empty())
        return exclude("unmapped translation word");
      job.query = rec.tgt_word_spans[word];
    }
    jobs.push_back(job);
    members.push_back({{}, m.cue.cue_gender, pro});
  };

  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!outcomes[i].accurate()) continue;
    add(pairs[i].pro, true, pairs[i].pair_id);
    add(pairs[i].anti, false, pairs[i].pair_id);
  }

  auto weights = exec == align::Execution::Parallel
                     ? attn::extract_parallel(model.dump, jobs, kind)
                     : attn::extract_serial(model.dump, jobs, kind);
  for (std::size_t i = 0; i < weights.size(); ++i) members[i].weights = std::move(weights[i]);
  result.n_members = members.size();
  result.splits = attn::split_and_aggregate(members);
  return result;
}

std::string outcome_records(std::span<const metrics::InstanceOutcome> outcomes) {
  std::string out;
  for (const auto& o : outcomes) {
    ordered_json j;
    j["line_no"] = o.line_no;
    j["gold"] = to_string(o.gold);
    j["extracted"] = to_string(o.extracted.gender);
    j["evidence"] = morph::to_string(o.extracted.evidence);
    j["correct"] = o.correct;
    j["target_word"] = o.target_word;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string pair_outcome_records(std::span<const metrics::PairOutcome> outcomes) {
  std::string out;
  for (const auto& o : outcomes) {
    ordered_json j;
    j["pair_id"] = o.pair_id;
    j["stereotype_gender"] = to_string(o.stereotype);
    j["pro_correct"] = o.pro_correct;
    j["anti_correct"] = o.anti_correct;
    j["accurate"] = o.accurate();
    j["extraction_failure"] = o.extraction_failure;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace mpa::pipeline
