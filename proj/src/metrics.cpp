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

#include "mpa/metrics.hpp"

#include <json.hpp>

namespace mpa::metrics {
namespace {

// 100 * num / den in hundredths, rounded half up in exact integer arithmetic.
unsigned long long hundredths(std::size_t num, std::size_t den) {
  return (20000ULL * num + den) / (2ULL * den);
}

double ratio_percent(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

void append_record(std::string& out, std::string_view metric, std::string_view cell,
                   std::size_t num, std::size_t den) {
  nlohmann::ordered_json rec;
  rec["metric"] = metric;
  rec["cell"] = cell;
  rec["value"] = den == 0 ? 0.0 : static_cast<double>(hundredths(num, den)) / 100.0;
  rec["numerator"] = num;
  rec["denominator"] = den;
  out += rec.dump();
  out += '\n';
}

}  // namespace

double Cell::percent() const { return ratio_percent(correct, total); }

AccuracyReport gender_accuracy(std::span<const InstanceOutcome> outcomes) {
  if (outcomes.empty()) throw UsageError("gender_accuracy: no outcomes");
  AccuracyReport r;
  for (const auto& o : outcomes) {
    Cell& cell = o.gold == Gender::Masculine ? r.male : r.female;
    ++cell.total;
    ++r.overall.total;
    if (o.correct) {
      ++cell.correct;
      ++r.overall.correct;
    }
  }
  return r;
}

MpaReport mpa(std::span<const PairOutcome> pairs) {
  if (pairs.empty()) throw UsageError("mpa: no pair outcomes");
  MpaReport r;
  r.n_pairs = pairs.size();
  for (const auto& p : pairs) {
    if (p.extraction_failure) ++r.n_failure_pairs;
    if (!p.accurate()) continue;
    ++r.n_accurate;
    if (p.stereotype == Gender::Feminine) {
      ++r.n_accurate_f;
    } else {
      ++r.n_accurate_m;
    }
  }
  r.mpa = ratio_percent(r.n_accurate, r.n_pairs);
  r.pro_f = ratio_percent(r.n_accurate_f, r.n_accurate);
  r.pro_m = ratio_percent(r.n_accurate_m, r.n_accurate);
  // An accurate pair has no Unknown member, so failures only shrink the
  // denominator.
  r.mpa_excluding_failures = ratio_percent(r.n_accurate, r.n_pairs - r.n_failure_pairs);
  return r;
}

std::size_t entity_target_token(const corpus::WinoInstance& instance,
                                const text::PreTokens& source, const text::PreTokens& target,
                                const align::Alignment& alignment) {
  const std::size_t src = source.first_content_token(instance.entity_index);
  if (src == std::string::npos) return std::string::npos;
  for (const std::size_t t : align::project_index(alignment, src))
    if (t < target.tokens.size() && !text::is_punct(target.tokens[t])) return t;
  return std::string::npos;
}

std::vector<InstanceOutcome> score_instances(std::span<const ScoreRecord> records,
                                             const morph::GenderLexicon& lexicon,
                                             ScoreDiagnostics* diag) {
  ScoreDiagnostics local;
  std::vector<InstanceOutcome> out;
  out.reserve(records.size());
  for (const auto& rec : records) {
    InstanceOutcome o;
    o.line_no = rec.instance->line_no;
    o.gold = rec.instance->gold_gender;
    if (rec.alignment == nullptr || rec.source == nullptr || rec.target == nullptr) {
      ++local.missing_translation;
      local.missing_lines.push_back(o.line_no);
      out.push_back(std::move(o));
      continue;
    }
    const std::size_t t = entity_target_token(*rec.instance, *rec.source, *rec.target,
                                              *rec.alignment);
    if (t == std::string::npos) {
      ++local.empty_projection;
      out.push_back(std::move(o));
      continue;
    }
    o.target_word = rec.target->tokens[t];
    o.extracted = morph::classify_gender(rec.target->tokens, t, lexicon);
    if (o.extracted.gender == Gender::Unknown) ++local.unknown_gender;
    o.correct = o.extracted.gender != Gender::Unknown && o.extracted.gender == o.gold;
    out.push_back(std::move(o));
  }
  if (diag != nullptr) *diag = local;
  return out;
}

std::string format_percent(std::size_t num, std::size_t den) {
  if (den == 0) return "0.00";
  const unsigned long long scaled = hundredths(num, den);
  const unsigned long long whole = scaled / 100, frac = scaled % 100;
  return std::to_string(whole) + "." + (frac < 10 ? "0" : "") + std::to_string(frac);
}

std::string accuracy_records(const AccuracyReport& report, std::string_view metric) {
  std::string out;
  append_record(out, metric, "overall", report.overall.correct, report.overall.total);
  append_record(out, metric, "male", report.male.correct, report.male.total);
  append_record(out, metric, "female", report.female.correct, report.female.total);
  return out;
}

std::string mpa_records(const MpaReport& report, bool diagnostics) {
  std::string out;
  append_record(out, "mpa", "all", report.n_accurate, report.n_pairs);
  append_record(out, "mpa", "pro_f", report.n_accurate_f, report.n_accurate);
  append_record(out, "mpa", "pro_m", report.n_accurate_m, report.n_accurate);
  if (diagnostics)
    append_record(out, "mpa", "excluding_failures", report.n_accurate,
                  report.n_pairs - report.n_failure_pairs);
  return out;
}

}  // namespace mpa::metrics
