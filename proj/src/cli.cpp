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

#include "mpa/cli.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "mpa/heatmap.hpp"
#include "mpa/io.hpp"
#include "mpa/pipeline.hpp"

namespace mpa::cli {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

struct Global {
  std::string out = ".";
  int threads = 0;
  std::uint64_t seed = 0;  // reserved
  bool strict = false;
};

struct Context {
  Global global;
  std::shared_ptr<spdlog::logger> log;
  std::vector<std::string> diagnostics;

  void diag(std::string message) {
    log->warn("{}", message);
    diagnostics.push_back(std::move(message));
  }
};

std::shared_ptr<spdlog::logger> make_logger() {
  auto log = std::make_shared<spdlog::logger>(
      "mpa-eval", std::make_shared<spdlog::sinks::stderr_sink_st>());
  log->set_pattern("mpa-eval: %l: %v");
  log->set_level(spdlog::level::warn);
  if (const char* env = std::getenv("MPA_EVAL_LOG"); env && *env)
    log->set_level(spdlog::level::from_str(env));
  return log;
}

std::string prefixed(const std::string& path, const char* what) {
  const std::string_view w(what);
  if (w.find(path) != std::string_view::npos) return std::string(w);
  return path + ": " + std::string(w);
}

// Runs `f`, naming `path` in any input error it raises.
template <class F>
auto with_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw ParseError(prefixed(path, e.what()));
  } catch (const ValidationError& e) {
    throw ValidationError(prefixed(path, e.what()));
  } catch (const UsageError& e) {
    throw UsageError(prefixed(path, e.what()));
  }
}

std::vector<corpus::WinoInstance> load_set(const std::string& path, Context& ctx) {
  Diagnostics d;
  auto set = with_path(path, [&] { return corpus::parse_winomt(io::read_text_file(path), &d); });
  for (const auto& m : d.messages) ctx.diag(path + ": " + m);
  if (set.empty()) throw ValidationError(path + ": no instances");
  return set;
}

morph::GenderLexicon load_lexicon(const std::string& path) {
  return with_path(path, [&] { return morph::GenderLexicon::parse(io::read_text_file(path)); });
}

struct PairCorpus {
  std::vector<corpus::WinoInstance> pro;
  std::vector<corpus::WinoInstance> anti;
  corpus::PairingResult pairing;
  double mean_length = 0.0;
};

PairCorpus load_pairs(const std::string& pro_path, const std::string& anti_path, Context& ctx) {
  PairCorpus pc;
  pc.pro = load_set(pro_path, ctx);
  pc.anti = load_set(anti_path, ctx);
  pc.pairing = with_path(pro_path + " / " + anti_path,
                         [&] { return corpus::build_minimal_pairs(pc.pro, pc.anti); });
  for (const auto& u : pc.pairing.unmatched) {
    const auto& path = u.side == corpus::PairSide::Pro ? pro_path : anti_path;
    ctx.diag(fmt::format("{}: line {}: unmatched: {}", path, u.line_no, u.reason));
  }
  if (pc.pairing.pairs.empty())
    throw ValidationError(fmt::format("{} / {}: no minimal pairs", pro_path, anti_path));
  pc.mean_length = corpus::mean_pair_length(pc.pairing.pairs);
  ctx.log->info("{} pairs, mean sentence length {:.4f} words", pc.pairing.pairs.size(),
                pc.mean_length);
  return pc;
}

void write_pairs(io::OutputDir& out, const PairCorpus& pc) {
  out.write("pairs.jsonl", corpus::serialize_pairs(pc.pairing.pairs));
  out.write("pairs_unmatched.jsonl", corpus::serialize_unmatched(pc.pairing.unmatched));
}

pipeline::AlignedDump load_dump(const std::string& dir, const align::Config& config,
                                Context& ctx) {
  auto aligned = with_path(dir, [&] { return pipeline::align_dump(dir, config); });
  for (const auto& r : aligned.dump.sentences())
    if (!r.mapping_error.empty())
      ctx.diag(fmt::format("{}: sentence {}: {}", dir, r.sentence_id, r.mapping_error));
  ctx.log->info("{}: {} sentences aligned", dir, aligned.dump.sentences().size());
  return aligned;
}

std::string alignment_lines(const pipeline::AlignedDump& d) {
  std::string out;
  for (const auto& a : d.alignments) {
    out += align::to_pharaoh(a);
    out += '\n';
  }
  return out;
}

std::string parallel_lines(const pipeline::AlignedDump& d) {
  std::string out;
  for (std::size_t i = 0; i < d.source.size(); ++i)
    out += fmt::format("{} ||| {}\n", text::join(d.source[i].tokens),
                       text::join(d.target[i].tokens));
  return out;
}

std::string likelihood_lines(const align::Model& model) {
  std::string out;
  const auto& ll = model.log_likelihood();
  for (std::size_t i = 0; i < ll.size(); ++i) {
    ordered_json j;
    j["iteration"] = i;
    j["log_likelihood"] = ll[i];
    out += j.dump();
    out += '\n';
  }
  return out;
}

void check_translations(const pipeline::SetEvaluation& ev, std::string_view set_name,
                        std::string_view dump, Context& ctx) {
  const auto& lines = ev.diagnostics.missing_lines;
  if (lines.empty()) return;
  std::string which;
  for (std::size_t i = 0; i < lines.size() && i < 5; ++i)
    which += (i ? ", " : "") + std::to_string(lines[i]);
  if (lines.size() > 5) which += ", ...";
  ctx.diag(fmt::format("{}: {} instance(s) of {} have no translation (line {})", dump,
                       lines.size(), set_name, which));
}

// ---------------------------------------------------------------------------
// Tables

struct AccuracyRow {
  std::string model;
  std::string set;
  metrics::AccuracyReport report;
};

std::string accuracy_table(std::span<const AccuracyRow> rows) {
  std::size_t w = 5;
  for (const auto& r : rows) w = std::max(w, r.model.size());
  std::string out = fmt::format("{:<{}}  {:<8}  {:>8}  {:>8}  {:>8}  {:>6}\n", "model", w, "set",
                                "overall", "male", "female", "n");
  for (const auto& r : rows) {
    const auto& a = r.report;
    out += fmt::format("{:<{}}  {:<8}  {:>8}  {:>8}  {:>8}  {:>6}\n", r.model, w, r.set,
                       metrics::format_percent(a.overall.correct, a.overall.total),
                       metrics::format_percent(a.male.correct, a.male.total),
                       metrics::format_percent(a.female.correct, a.female.total),
                       a.overall.total);
  }
  return out;
}

struct MpaRow {
  std::string model;
  metrics::MpaReport report;
};

std::string mpa_table(std::span<const MpaRow> rows, bool diagnostics) {
  std::size_t w = 5;
  for (const auto& r : rows) w = std::max(w, r.model.size());
  std::string out = fmt::format("{:<{}}  {:>6}  {:>8}  {:>8}", "model", w, "pairs", "accurate",
                                "MPA");
  if (diagnostics) out += fmt::format("  {:>8}  {:>14}", "failures", "MPA w/o fail.");
  out += '\n';
  for (const auto& r : rows) {
    const auto& m = r.report;
    out += fmt::format("{:<{}}  {:>6}  {:>8}  {:>8}", r.model, w, m.n_pairs, m.n_accurate,
                       metrics::format_percent(m.n_accurate, m.n_pairs));
    if (diagnostics)
      out += fmt::format("  {:>8}  {:>14}", m.n_failure_pairs,
                         metrics::format_percent(m.n_accurate, m.n_pairs - m.n_failure_pairs));
    out += '\n';
  }
  return out;
}

std::string stereotype_table(std::span<const MpaRow> rows) {
  std::size_t w = 5;
  for (const auto& r : rows) w = std::max(w, r.model.size());
  std::string out =
      fmt::format("{:<{}}  {:>8}  {:>8}  {:>8}\n", "model", w, "accurate", "Pro-F", "Pro-M");
  for (const auto& r : rows) {
    const auto& m = r.report;
    out += fmt::format("{:<{}}  {:>8}  {:>8}  {:>8}\n", r.model, w, m.n_accurate,
                       metrics::format_percent(m.n_accurate_f, m.n_accurate),
                       metrics::format_percent(m.n_accurate_m, m.n_accurate));
  }
  return out;
}

// Prefixes each metrics record with the given leading fields.
std::string tagged_records(const std::string& records, const ordered_json& tags) {
  std::string out;
  std::size_t pos = 0;
  while (pos < records.size()) {
    const std::size_t nl = records.find('\n', pos);
    const auto line = records.substr(pos, nl - pos);
    pos = nl == std::string::npos ? records.size() : nl + 1;
    if (line.empty()) continue;
    ordered_json j = tags;
    const ordered_json record = ordered_json::parse(line);
    for (const auto& [k, v] : record.items()) j[k] = v;
    out += j.dump();
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Attention output

std::vector<attn::Kind> parse_kinds(const std::string& kind) {
  if (kind == "self") return {attn::Kind::SelfAttention};
  if (kind == "cross") return {attn::Kind::CrossAttention};
  return {attn::Kind::SelfAttention, attn::Kind::CrossAttention};
}

bool any_cross(const attn::Dump& dump) {
  for (std::size_t i = 0; i < dump.sentences().size(); ++i)
    if (dump.has_cross(i)) return true;
  return false;
}

double grid_max(std::span<const pipeline::AttentionResult> results) {
  double m = 0.0;
  for (const auto& r : results)
    for (const auto& g : r.splits.grids)
      for (const double v : g.mean.values) m = std::max(m, v);
  return m;
}

struct AttnSettings {
  attn::Thresholds thresholds;
  std::optional<double> scale_max;
};

// Writes heatmaps under `prefix` and returns the flagged heads as records and
// as text listing lines.
struct HeadListing {
  std::string records;
  std::string text;
};

HeadListing write_attention(io::OutputDir& out, const fs::path& prefix, const std::string& model,
                            std::span<const pipeline::AttentionResult> results, double scale_max,
                            double mean_length, const attn::Thresholds& thresholds) {
  HeadListing listing;
  for (const auto& r : results) {
    const auto kind = attn::to_string(r.kind);
    for (const auto& grid : r.splits.grids) {
      const auto split = attn::to_string(grid.split);
      const auto title = fmt::format("{}: {} attention, cue to profession, {} (n = {})", model,
                                     kind, split, grid.count);
      const auto files = heatmap::emit(grid, scale_max, title);
      const auto stem = fmt::format("{}_{}", split, kind);
      out.write(prefix / "heatmaps" / (stem + ".csv"), files.csv);
      out.write(prefix / "heatmaps" / (stem + ".svg"), files.svg);

      const double baseline = attn::uniform_baseline(mean_length);
      for (const auto& f : attn::flag_heads(grid, mean_length, thresholds)) {
        ordered_json j;
        j["model"] = model;
        j["metric"] = "head";
        j["kind"] = kind;
        j["split"] = split;
        j["count"] = grid.count;
        j["layer"] = f.layer;
        j["head"] = f.head;
        j["value"] = f.value;
        j["tier"] = attn::to_string(f.tier);
        listing.records += j.dump();
        listing.records += '\n';
        listing.text += fmt::format("{:<6}  {:<14}  {:>5}  {:>5}  {:>4}  {:>8.4f}  {:>6.2f}x  {}\n",
                                    kind, split, grid.count, f.layer, f.head, f.value,
                                    f.value / baseline, attn::to_string(f.tier));
      }
    }
    for (const auto split : r.splits.omitted)
      listing.text += fmt::format("{:<6}  {:<14}  omitted: no members\n", kind,
                                  attn::to_string(split));
    if (!r.excluded.empty())
      listing.text += fmt::format("{:<6}  {} pair member(s) excluded\n", kind, r.excluded.size());
  }
  return listing;
}

std::string head_listing_header(double mean_length, const attn::Thresholds& t) {
  const double b = attn::uniform_baseline(mean_length);
  return fmt::format(
      "mean sentence length {:.2f} words, uniform baseline {:.4f}; salient >= {:.4f} ({}x), "
      "strong >= {:.4f} ({}x)\n{:<6}  {:<14}  {:>5}  {:>5}  {:>4}  {:>8}  {:>7}  {}\n",
      mean_length, b, t.salient * b, t.salient, t.strong * b, t.strong, "kind", "split", "n",
      "layer", "head", "mean", "ratio", "tier");
}

// ---------------------------------------------------------------------------
// Per-model evaluation

struct ModelRun {
  pipeline::AlignedDump aligned;
  std::optional<pipeline::SetEvaluation> regular;
  pipeline::SetEvaluation pro;
  pipeline::SetEvaluation anti;
  std::vector<metrics::PairOutcome> pair_outcomes;
  metrics::MpaReport mpa;
  std::vector<pipeline::AttentionResult> attention;
};

ModelRun run_model(const std::string& dir, const align::Config& config, const PairCorpus& pc,
                   const std::vector<corpus::WinoInstance>* regular,
                   const morph::GenderLexicon& lexicon, std::span<const attn::Kind> kinds,
                   Context& ctx) {
  ModelRun run{load_dump(dir, config, ctx), {}, {}, {}, {}, {}, {}};
  if (regular) {
    run.regular = pipeline::evaluate_set(run.aligned, *regular, lexicon);
    check_translations(*run.regular, "the regular set", dir, ctx);
  }
  run.pro = pipeline::evaluate_set(run.aligned, pc.pro, lexicon);
  run.anti = pipeline::evaluate_set(run.aligned, pc.anti, lexicon);
  check_translations(run.pro, "the pro set", dir, ctx);
  check_translations(run.anti, "the anti set", dir, ctx);
  run.pair_outcomes = pipeline::pair_outcomes(pc.pairing.pairs, run.pro, run.anti);
  run.mpa = metrics::mpa(run.pair_outcomes);

  for (const auto kind : kinds) {
    if (kind == attn::Kind::CrossAttention && !any_cross(run.aligned.dump)) {
      ctx.log->info("{}: no cross-attention tensors, skipping", dir);
      continue;
    }
    run.attention.push_back(
        pipeline::attention_grids(run.aligned, pc.pairing.pairs, run.pair_outcomes, kind));
    for (const auto& e : run.attention.back().excluded)
      ctx.log->info("{}: {} attention: excluded {}", dir, attn::to_string(kind), e);
  }
  return run;
}

std::vector<AccuracyRow> accuracy_rows(const std::string& label, const ModelRun& run) {
  std::vector<AccuracyRow> rows;
  if (run.regular) rows.push_back({label, "REG", run.regular->accuracy});
  rows.push_back({label, "PRO-S", run.pro.accuracy});
  rows.push_back({label, "ANTI-S", run.anti.accuracy});
  return rows;
}

std::string diagnostics_table(std::span<const std::pair<std::string, const ModelRun*>> runs) {
  std::size_t w = 5;
  for (const auto& [label, run] : runs) w = std::max(w, label.size());
  std::string out = fmt::format("{:<{}}  {:<8}  {:>11}  {:>16}  {:>14}\n", "model", w, "set",
                                "missing", "empty projection", "unknown gender");
  for (const auto& [label, run] : runs) {
    auto row = [&](std::string_view set, const pipeline::SetEvaluation& ev) {
      const auto& d = ev.diagnostics;
      out += fmt::format("{:<{}}  {:<8}  {:>11}  {:>16}  {:>14}\n", label, w, set,
                         d.missing_translation, d.empty_projection, d.unknown_gender);
    };
    if (run->regular) row("REG", *run->regular);
    row("PRO-S", run->pro);
    row("ANTI-S", run->anti);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subcommands

int finish(Context& ctx, io::OutputDir& out) {
  if (ctx.global.strict && !ctx.diagnostics.empty()) {
    std::cerr << fmt::format("mpa-eval: error: {} diagnostic(s) with --strict; no output written\n",
                             ctx.diagnostics.size());
    return kInputError;
  }
  out.commit();
  return kOk;
}

struct PairArgs {
  std::string pro, anti;
};

int cmd_build_pairs(Context& ctx, const PairArgs& a) {
  const auto pc = load_pairs(a.pro, a.anti, ctx);
  io::OutputDir out(ctx.global.out);
  write_pairs(out, pc);
  std::cout << fmt::format("{} pairs, {} unmatched, mean sentence length {:.4f} words\n",
                           pc.pairing.pairs.size(), pc.pairing.unmatched.size(), pc.mean_length);
  return finish(ctx, out);
}

struct AlignArgs {
  std::string dump, corpus;
  align::Config config;
};

int cmd_align(Context& ctx, const AlignArgs& a) {
  if (a.dump.empty() == a.corpus.empty())
    throw UsageError("align: give exactly one of --dump or --corpus");
  io::OutputDir out(ctx.global.out);
  if (!a.dump.empty()) {
    const auto aligned = load_dump(a.dump, a.config, ctx);
    out.write("alignments.txt", alignment_lines(aligned));
    out.write("corpus.txt", parallel_lines(aligned));
    out.write("align_log.jsonl", likelihood_lines(aligned.aligner));
    std::cout << fmt::format("{} sentences aligned\n", aligned.alignments.size());
    return finish(ctx, out);
  }

  const auto content = io::read_text_file(a.corpus);
  std::vector<align::SentencePair> corpus;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    const std::size_t nl = content.find('\n', pos);
    const auto line = content.substr(pos, nl - pos);
    pos = nl == std::string::npos ? content.size() : nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      corpus.push_back(align::parse_parallel_line(line));
    } catch (const ParseError& e) {
      throw ParseError(fmt::format("{}: {}", a.corpus, e.what()), line_no);
    }
  }
  const auto model = with_path(a.corpus, [&] { return align::train(corpus, a.config); });
  std::string lines;
  for (const auto& p : corpus) {
    lines += align::to_pharaoh(align::viterbi_align(model, p.source, p.target));
    lines += '\n';
  }
  out.write("alignments.txt", lines);
  out.write("align_log.jsonl", likelihood_lines(model));
  std::cout << fmt::format("{} sentences aligned\n", corpus.size());
  return finish(ctx, out);
}

struct EvaluateArgs {
  std::string set, dump, lexicon, name = "set";
  align::Config config;
};

int cmd_evaluate(Context& ctx, const EvaluateArgs& a) {
  const auto set = load_set(a.set, ctx);
  const auto lexicon = load_lexicon(a.lexicon);
  const auto aligned = load_dump(a.dump, a.config, ctx);
  const auto ev = pipeline::evaluate_set(aligned, set, lexicon);
  check_translations(ev, a.name, a.dump, ctx);

  io::OutputDir out(ctx.global.out);
  out.write("alignments.txt", alignment_lines(aligned));
  out.write("outcomes.jsonl", pipeline::outcome_records(ev.outcomes));
  out.write("accuracy.jsonl", metrics::accuracy_records(ev.accuracy, a.name));
  const std::vector<AccuracyRow> rows{{aligned.label, a.name, ev.accuracy}};
  const auto table = accuracy_table(rows);
  out.write("accuracy.txt", table);
  std::cout << table;
  return finish(ctx, out);
}

struct MpaArgs {
  PairArgs pairs;
  std::string dump, lexicon;
  bool diagnostics = false;
  align::Config config;
};

int cmd_mpa(Context& ctx, const MpaArgs& a) {
  const auto pc = load_pairs(a.pairs.pro, a.pairs.anti, ctx);
  const auto lexicon = load_lexicon(a.lexicon);
  const auto run = run_model(a.dump, a.config, pc, nullptr, lexicon, {}, ctx);

  io::OutputDir out(ctx.global.out);
  write_pairs(out, pc);
  out.write("alignments.txt", alignment_lines(run.aligned));
  out.write("outcomes_pro.jsonl", pipeline::outcome_records(run.pro.outcomes));
  out.write("outcomes_anti.jsonl", pipeline::outcome_records(run.anti.outcomes));
  out.write("pair_outcomes.jsonl", pipeline::pair_outcome_records(run.pair_outcomes));
  out.write("mpa.jsonl", metrics::mpa_records(run.mpa, a.diagnostics));
  const std::vector<MpaRow> rows{{run.aligned.label, run.mpa}};
  const auto text = mpa_table(rows, a.diagnostics) + "\n" + stereotype_table(rows);
  out.write("mpa.txt", text);
  std::cout << text;
  return finish(ctx, out);
}

struct AttnArgs {
  PairArgs pairs;
  std::string dump, lexicon, kind = "both";
  AttnSettings settings;
  align::Config config;
};

int cmd_attn(Context& ctx, const AttnArgs& a) {
  const auto pc = load_pairs(a.pairs.pro, a.pairs.anti, ctx);
  const auto lexicon = load_lexicon(a.lexicon);
  const auto kinds = parse_kinds(a.kind);
  const auto run = run_model(a.dump, a.config, pc, nullptr, lexicon, kinds, ctx);

  double scale = a.settings.scale_max.value_or(grid_max(run.attention));
  if (!(scale > 0.0)) scale = 1.0;

  io::OutputDir out(ctx.global.out);
  write_pairs(out, pc);
  const auto listing = write_attention(out, "", run.aligned.label, run.attention, scale,
                                       pc.mean_length, a.settings.thresholds);
  out.write("heads.jsonl", listing.records);
  const auto text = head_listing_header(pc.mean_length, a.settings.thresholds) + listing.text;
  out.write("heads.txt", text);
  std::cout << text;
  return finish(ctx, out);
}

struct ReportArgs {
  PairArgs pairs;
  std::string regular, lexicon, kind = "both";
  std::vector<std::string> dumps;
  AttnSettings settings;
  align::Config config;
};

int cmd_report(Context& ctx, const ReportArgs& a) {
  const auto pc = load_pairs(a.pairs.pro, a.pairs.anti, ctx);
  std::optional<std::vector<corpus::WinoInstance>> regular;
  if (!a.regular.empty()) regular = load_set(a.regular, ctx);
  const auto lexicon = load_lexicon(a.lexicon);
  const auto kinds = parse_kinds(a.kind);

  std::vector<std::pair<std::string, ModelRun>> runs;
  std::map<std::string, int> seen;
  for (const auto& dir : a.dumps) {
    auto run = run_model(dir, a.config, pc, regular ? &*regular : nullptr, lexicon, kinds, ctx);
    std::string label = run.aligned.label;
    if (const int n = ++seen[label]; n > 1) label += fmt::format("-{}", n);
    runs.emplace_back(std::move(label), std::move(run));
  }

  double scale = 0.0;
  if (a.settings.scale_max) {
    scale = *a.settings.scale_max;
  } else {
    for (const auto& [label, run] : runs) scale = std::max(scale, grid_max(run.attention));
  }
  if (!(scale > 0.0)) scale = 1.0;

  io::OutputDir out(ctx.global.out);
  write_pairs(out, pc);

  std::vector<AccuracyRow> acc_rows;
  std::vector<MpaRow> mpa_rows;
  std::vector<std::pair<std::string, const ModelRun*>> diag_rows;
  std::string records, heads_text;
  for (const auto& [label, run] : runs) {
    const fs::path dir = label;
    out.write(dir / "alignments.txt", alignment_lines(run.aligned));
    if (run.regular)
      out.write(dir / "outcomes_regular.jsonl", pipeline::outcome_records(run.regular->outcomes));
    out.write(dir / "outcomes_pro.jsonl", pipeline::outcome_records(run.pro.outcomes));
    out.write(dir / "outcomes_anti.jsonl", pipeline::outcome_records(run.anti.outcomes));
    out.write(dir / "pair_outcomes.jsonl", pipeline::pair_outcome_records(run.pair_outcomes));

    for (auto& row : accuracy_rows(label, run)) {
      records += tagged_records(metrics::accuracy_records(row.report, "accuracy"),
                                {{"model", label}, {"set", row.set}});
      acc_rows.push_back(std::move(row));
    }
    records += tagged_records(metrics::mpa_records(run.mpa, true), {{"model", label}});
    mpa_rows.push_back({label, run.mpa});
    diag_rows.emplace_back(label, &run);

    const auto listing = write_attention(out, dir, label, run.attention, scale, pc.mean_length,
                                         a.settings.thresholds);
    out.write(dir / "heads.jsonl", listing.records);
    records += listing.records;
    heads_text += fmt::format("[{}]\n", label);
    heads_text += listing.text.empty() ? "no heads above the salient threshold\n" : listing.text;
  }

  ordered_json base;
  base["metric"] = "baseline";
  base["mean_sentence_length"] = pc.mean_length;
  base["baseline"] = attn::uniform_baseline(pc.mean_length);
  base["scale_max"] = scale;
  records += base.dump() + "\n";

  std::string report;
  report += fmt::format("Minimal pairs: {} (unmatched: {})\n\n", pc.pairing.pairs.size(),
                        pc.pairing.unmatched.size());
  report += "Gender accuracy (%)\n" + accuracy_table(acc_rows) + "\n";
  report += "Minimal pair accuracy (%)\n" + mpa_table(mpa_rows, true) + "\n";
  report += "Accurate pairs by stereotype (%)\n" + stereotype_table(mpa_rows) + "\n";
  report += "Extraction diagnostics (instances)\n" + diagnostics_table(diag_rows) + "\n";
  report += "Attention heads above the uniform baseline\n" +
            head_listing_header(pc.mean_length, a.settings.thresholds) + heads_text;
  report += fmt::format("\nheatmap scale: 0 to {:.6f}\n", scale);

  out.write("report.txt", report);
  out.write("report.jsonl", records);
  std::cout << report;
  return finish(ctx, out);
}

// ---------------------------------------------------------------------------

void add_align_options(CLI::App* sub, align::Config& c) {
  sub->add_option("--iterations", c.iterations, "EM iterations")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--lambda", c.lambda, "Diagonal tension")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--p-null", c.p_null, "NULL link probability")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
}

void add_pair_options(CLI::App* sub, PairArgs& p) {
  sub->add_option("--pro", p.pro, "Pro-stereotypical set (WinoMT format)")->required();
  sub->add_option("--anti", p.anti, "Anti-stereotypical set (WinoMT format)")->required();
}

void add_attn_options(CLI::App* sub, std::string& kind, AttnSettings& s) {
  sub->add_option("--kind", kind, "Attention kind")
      ->capture_default_str()
      ->check(CLI::IsMember({"self", "cross", "both"}));
  sub->add_option_function<double>(
         "--scale-max", [&s](const double& v) { s.scale_max = v; },
         "Heatmap colour scale maximum (default: largest cell)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--salient", s.thresholds.salient, "Salient tier, multiple of the baseline")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--strong", s.thresholds.strong, "Strong tier, multiple of the baseline")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

}  // namespace

int run(const std::vector<std::string>& args) {
  std::vector<std::string> storage{"mpa-eval"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, char** argv) {
  Context ctx;
  ctx.log = make_logger();

  CLI::App app{"Gender bias evaluation of machine translation with minimal pairs", "mpa-eval"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--out", ctx.global.out, "Output directory")->capture_default_str();
  app.add_option("--threads", ctx.global.threads, "Worker threads (0 = OpenMP default)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--seed", ctx.global.seed, "Reserved; the pipeline has no random steps");
  app.add_flag("--strict", ctx.global.strict, "Treat diagnostics as errors");

  PairArgs pairs_args;
  auto* build = app.add_subcommand("build-pairs", "Match pro and anti instances into pairs");
  add_pair_options(build, pairs_args);

  AlignArgs align_args;
  auto* align_cmd = app.add_subcommand("align", "Train the aligner and write Viterbi alignments");
  auto* dump_opt = align_cmd->add_option("--dump", align_args.dump, "Dump directory");
  auto* corpus_opt =
      align_cmd->add_option("--corpus", align_args.corpus, "Parallel text, 'src ||| tgt'");
  dump_opt->excludes(corpus_opt);
  add_align_options(align_cmd, align_args.config);

  EvaluateArgs eval_args;
  auto* eval_cmd = app.add_subcommand("evaluate", "Gender accuracy of one challenge set");
  eval_cmd->add_option("--set", eval_args.set, "Challenge set (WinoMT format)")->required();
  eval_cmd->add_option("--dump", eval_args.dump, "Dump directory")->required();
  eval_cmd->add_option("--lexicon", eval_args.lexicon, "Gender lexicon")->required();
  eval_cmd->add_option("--name", eval_args.name, "Set name in the output")->capture_default_str();
  add_align_options(eval_cmd, eval_args.config);

  MpaArgs mpa_args;
  auto* mpa_cmd = app.add_subcommand("mpa", "Minimal pair accuracy");
  add_pair_options(mpa_cmd, mpa_args.pairs);
  mpa_cmd->add_option("--dump", mpa_args.dump, "Dump directory")->required();
  mpa_cmd->add_option("--lexicon", mpa_args.lexicon, "Gender lexicon")->required();
  mpa_cmd->add_flag("--diagnostics", mpa_args.diagnostics,
                    "Also report MPA without extraction-failure pairs");
  add_align_options(mpa_cmd, mpa_args.config);

  AttnArgs attn_args;
  auto* attn_cmd = app.add_subcommand("attn", "Cue-to-profession attention heatmaps");
  add_pair_options(attn_cmd, attn_args.pairs);
  attn_cmd->add_option("--dump", attn_args.dump, "Dump directory")->required();
  attn_cmd->add_option("--lexicon", attn_args.lexicon, "Gender lexicon")->required();
  add_attn_options(attn_cmd, attn_args.kind, attn_args.settings);
  add_align_options(attn_cmd, attn_args.config);

  ReportArgs report_args;
  auto* report_cmd = app.add_subcommand("report", "Combined report over one or more models");
  add_pair_options(report_cmd, report_args.pairs);
  report_cmd->add_option("--regular", report_args.regular, "Regular set (WinoMT format)");
  report_cmd->add_option("--dump", report_args.dumps, "Dump directory (repeatable)")
      ->required()
      ->take_all();
  report_cmd->add_option("--lexicon", report_args.lexicon, "Gender lexicon")->required();
  add_attn_options(report_cmd, report_args.kind, report_args.settings);
  add_align_options(report_cmd, report_args.config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  if (ctx.global.threads > 0) omp_set_num_threads(ctx.global.threads);

  try {
    if (build->parsed()) return cmd_build_pairs(ctx, pairs_args);
    if (align_cmd->parsed()) return cmd_align(ctx, align_args);
    if (eval_cmd->parsed()) return cmd_evaluate(ctx, eval_args);
    if (mpa_cmd->parsed()) return cmd_mpa(ctx, mpa_args);
    if (attn_cmd->parsed()) return cmd_attn(ctx, attn_args);
    if (report_cmd->parsed()) return cmd_report(ctx, report_args);
    throw InvariantError("no subcommand selected");
  } catch (const InvariantError& e) {
    std::cerr << "mpa-eval: internal error: " << e.what() << '\n';
    return kInternalError;
  } catch (const NumericError& e) {
    std::cerr << "mpa-eval: numeric error: " << e.what() << '\n';
    return kInternalError;
  } catch (const Error& e) {
    std::cerr << "mpa-eval: error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "mpa-eval: internal error: " << e.what() << '\n';
    return kInternalError;
  }
}

}  // namespace mpa::cli
